#include "rehab/fuzzy.hpp"

#include <set>

namespace rehab {

double mf_eval(const TriangularMF& mf, double x) {
    if (x < mf.alpha || x > mf.gamma) return 0.0;
    if (x == mf.beta) return 1.0;
    if (x < mf.beta) return (x - mf.alpha) / (mf.beta - mf.alpha);
    return (mf.gamma - x) / (mf.gamma - mf.beta);
}

double term_centroid(const TriangularMF& mf) {
    if (mf.alpha == mf.gamma) return mf.beta;
    return (mf.alpha + mf.beta + mf.gamma) / 3.0;
}

const Term* LinguisticVariable::find_term(const std::string& label) const {
    for (const Term& t : terms) {
        if (t.label == label) return &t;
    }
    return nullptr;
}

std::map<std::string, double> fuzzify(const LinguisticVariable& var, double x) {
    const double cx = var.clamp(x);
    std::map<std::string, double> degrees;
    for (const Term& t : var.terms) {
        degrees[t.label] = mf_eval(t.mf, cx);
    }
    return degrees;
}

const LinguisticVariable* RuleBase::find_input(const std::string& name) const {
    for (const LinguisticVariable& v : inputs) {
        if (v.name == name) return &v;
    }
    return nullptr;
}

namespace {

void check_variable(const LinguisticVariable& var) {
    if (!(var.lo < var.hi)) {
        throw ConfigError("variable '" + var.name + "': universe must satisfy lo < hi");
    }
    if (var.terms.empty()) {
        throw ConfigError("variable '" + var.name + "': no terms declared");
    }
    std::set<std::string> labels;
    for (const Term& t : var.terms) {
        if (!labels.insert(t.label).second) {
            throw ConfigError("variable '" + var.name + "': duplicate term label '" +
                              t.label + "'");
        }
        const TriangularMF& mf = t.mf;
        if (!(mf.alpha <= mf.beta && mf.beta <= mf.gamma)) {
            throw ConfigError("variable '" + var.name + "', term '" + t.label +
                              "': triangle must satisfy alpha <= beta <= gamma");
        }
        if (mf.gamma < var.lo || mf.alpha > var.hi) {
            throw ConfigError("variable '" + var.name + "', term '" + t.label +
                              "': triangle does not intersect the universe");
        }
    }
}

}  // namespace

std::vector<std::pair<double, double>> coverage_gaps(const LinguisticVariable& var) {
    // Membership is piecewise linear with breakpoints at the triangle
    // parameters, so scanning elementary intervals between consecutive
    // breakpoints (probing each midpoint) decides coverage exactly.
    std::set<double> points{var.lo, var.hi};
    for (const Term& t : var.terms) {
        for (double p : {t.mf.alpha, t.mf.beta, t.mf.gamma}) {
            if (p > var.lo && p < var.hi) points.insert(p);
        }
    }
    const std::vector<double> grid(points.begin(), points.end());

    auto covered_at = [&var](double x) {
        for (const Term& t : var.terms) {
            if (mf_eval(t.mf, x) > 0.0) return true;
        }
        return false;
    };

    std::vector<std::pair<double, double>> gaps;
    auto note_gap = [&gaps](double a, double b) {
        if (!gaps.empty() && gaps.back().second == a) {
            gaps.back().second = b;
        } else {
            gaps.emplace_back(a, b);
        }
    };
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!covered_at(0.5 * (grid[i] + grid[i + 1]))) {
            note_gap(grid[i], grid[i + 1]);
        }
    }
    // Isolated uncovered breakpoints (e.g. a single point where two open
    // supports meet) surface as zero-length gaps.
    for (double x : grid) {
        if (covered_at(x)) continue;
        bool inside = false;
        for (const auto& [a, b] : gaps) {
            if (x >= a && x <= b) {
                inside = true;
                break;
            }
        }
        if (!inside) gaps.emplace_back(x, x);
    }
    std::sort(gaps.begin(), gaps.end());
    return gaps;
}

void check_rulebase(const RuleBase& rb) {
    std::set<std::string> names;
    for (const LinguisticVariable& v : rb.inputs) {
        check_variable(v);
        if (!names.insert(v.name).second) {
            throw ConfigError("duplicate variable name '" + v.name + "'");
        }
    }
    check_variable(rb.output);
    if (names.count(rb.output.name)) {
        throw ConfigError("output variable '" + rb.output.name +
                          "' collides with an input variable");
    }
    for (std::size_t i = 0; i < rb.rules.size(); ++i) {
        const Rule& rule = rb.rules[i];
        const std::string where = "rule " + std::to_string(i + 1);
        if (!(rule.weight >= 0.0 && rule.weight <= 1.0)) {
            throw ConfigError(where + ": weight outside [0,1]");
        }
        if (rule.or_groups.empty()) {
            throw ConfigError(where + ": empty antecedent");
        }
        for (const auto& group : rule.or_groups) {
            if (group.empty()) {
                throw ConfigError(where + ": empty AND group");
            }
            for (const Clause& c : group) {
                const LinguisticVariable* var = rb.find_input(c.variable);
                if (var == nullptr) {
                    throw ConfigError(where + ": unknown variable '" + c.variable + "'");
                }
                if (var->find_term(c.term) == nullptr) {
                    throw ConfigError(where + ": variable '" + c.variable +
                                      "' has no term '" + c.term + "'");
                }
            }
        }
        if (rb.output.find_term(rule.consequent_term) == nullptr) {
            throw ConfigError(where + ": output has no term '" +
                              rule.consequent_term + "'");
        }
    }
}

double firing_strength(const Rule& rule, const RuleBase& rb,
                       const InputValues& inputs) {
    double strength = 0.0;
    bool first_group = true;
    for (const auto& group : rule.or_groups) {
        double group_degree = 1.0;
        for (const Clause& c : group) {
            const LinguisticVariable* var = rb.find_input(c.variable);
            if (var == nullptr) {
                throw ConfigError("rule references unknown variable '" + c.variable + "'");
            }
            const Term* term = var->find_term(c.term);
            if (term == nullptr) {
                throw ConfigError("variable '" + c.variable + "' has no term '" +
                                  c.term + "'");
            }
            auto it = inputs.find(c.variable);
            if (it == inputs.end()) {
                throw ConfigError("missing input for variable '" + c.variable + "'");
            }
            double degree = mf_eval(term->mf, var->clamp(it->second));
            if (c.negated) degree = negate(degree);
            group_degree = t_norm(group_degree, degree);
        }
        strength = first_group ? group_degree : s_norm(strength, group_degree);
        first_group = false;
    }
    return rule.weight * strength;
}

InferenceResult infer(const RuleBase& rb, const InputValues& inputs) {
    InferenceResult result;
    result.firing_strengths.reserve(rb.rules.size());

    double weighted_sum = 0.0;
    double total = 0.0;
    for (const Rule& rule : rb.rules) {
        const double w = firing_strength(rule, rb, inputs);
        result.firing_strengths.push_back(w);
        auto [it, inserted] =
            result.term_activations.try_emplace(rule.consequent_term, w);
        if (!inserted) it->second = std::max(it->second, w);

        const Term* term = rb.output.find_term(rule.consequent_term);
        if (term == nullptr) {
            throw ConfigError("output has no term '" + rule.consequent_term + "'");
        }
        weighted_sum += w * term_centroid(term->mf);
        total += w;
    }
    if (total <= 0.0) {
        throw NoRuleFiredError("no rule fired for the given inputs");
    }
    result.crisp = rb.output.clamp(weighted_sum / total);
    return result;
}

double defuzz_centroid_aggregate(const RuleBase& rb, const InputValues& inputs,
                                 int resolution) {
    if (resolution < 100) {
        throw ConfigError("defuzzification resolution must be at least 100");
    }

    // One clip level per output term: the max firing strength among rules
    // with that consequent.
    std::map<std::string, double> clip;
    for (const Rule& rule : rb.rules) {
        const double w = firing_strength(rule, rb, inputs);
        auto [it, inserted] = clip.try_emplace(rule.consequent_term, w);
        if (!inserted) it->second = std::max(it->second, w);
    }

    double mass = 0.0;
    double moment = 0.0;
    for (int k = 0; k < resolution; ++k) {
        const double x = rb.output.lo + (rb.output.hi - rb.output.lo) *
                                            static_cast<double>(k) /
                                            static_cast<double>(resolution - 1);
        double mu = 0.0;
        for (const auto& [label, level] : clip) {
            const Term* term = rb.output.find_term(label);
            if (term == nullptr) {
                throw ConfigError("output has no term '" + label + "'");
            }
            mu = std::max(mu, std::min(level, mf_eval(term->mf, x)));
        }
        mass += mu;
        moment += x * mu;
    }
    if (mass <= 0.0) {
        throw NoRuleFiredError("aggregate membership mass is zero");
    }
    return moment / mass;
}

}  // namespace rehab

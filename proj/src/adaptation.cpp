#include "rehab/adaptation.hpp"

#include <algorithm>

#include "rehab/dsl.hpp"

namespace rehab {

const char* action_name(AdaptAction a) {
    switch (a) {
        case AdaptAction::Progression: return "Progression";
        case AdaptAction::Repetition: return "Repetition";
        case AdaptAction::Simplification: return "Simplification";
        default: return "Harmfulness";
    }
}

namespace {

// Uniform partition: k peaks at lo + (hi-lo)*i/(k-1), each triangle's feet at
// the neighboring peaks, boundary terms with a degenerate edge.
LinguisticVariable partition_variable(const std::string& name, double lo, double hi,
                                      const std::vector<std::string>& labels) {
    LinguisticVariable var;
    var.name = name;
    var.lo = lo;
    var.hi = hi;
    const int k = static_cast<int>(labels.size());
    auto peak = [&](int i) {
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
    };
    for (int i = 0; i < k; ++i) {
        const double a = (i == 0) ? peak(0) : peak(i - 1);
        const double c = (i == k - 1) ? peak(k - 1) : peak(i + 1);
        var.terms.push_back({labels[i], {a, peak(i), c}});
    }
    return var;
}

const std::vector<std::string> kGrades4 = {"VG", "G", "B", "H"};
const std::vector<std::string> kGrades3 = {"VG", "G", "B"};

}  // namespace

std::vector<LinguisticVariable> default_variables() {
    std::vector<LinguisticVariable> vars;
    for (const char* name : {"O.E_W", "O.E_E", "O.E_S", "P.E_W", "P.E_E", "P.E_S",
                             "AV.E_W", "AV.E_E", "AV.E_S"}) {
        vars.push_back(partition_variable(name, 0.0, 90.0, kGrades4));
    }
    vars.push_back(partition_variable("T.E_H", 0.0, 32.0, kGrades4));
    vars.push_back(partition_variable("T.E_S", 0.0, 36.0, kGrades4));
    vars.push_back(partition_variable("T.E_C", 0.0, 6.0, kGrades3));
    vars.push_back(partition_variable("T.E_R", 0.0, 6.0, kGrades3));

    LinguisticVariable out;
    out.name = "GameProgress";
    out.lo = 0.0;
    out.hi = 80.0;
    out.terms = {
        {"Progression", {-10.0, 10.0, 30.0}},
        {"Repetition", {10.0, 30.0, 50.0}},
        {"Simplification", {30.0, 50.0, 70.0}},
        {"Harmfulness", {50.0, 70.0, 90.0}},
    };
    vars.push_back(out);
    return vars;
}

namespace {

// Consequent per grade: VG earns Progression, G Repetition, B Simplification,
// H Harmfulness.
const char* grade_consequent(const std::string& grade) {
    if (grade == "VG") return "Progression";
    if (grade == "G") return "Repetition";
    if (grade == "B") return "Simplification";
    return "Harmfulness";
}

RuleBase build_default_rulebase() {
    RuleBase rb;
    std::vector<LinguisticVariable> vars = default_variables();
    rb.output = vars.back();
    vars.pop_back();
    rb.inputs = std::move(vars);

    // Per-input grading rules. Their small uniform weight makes them pure
    // tie-breakers: with several inputs at the same grade they nudge the
    // crisp output proportionally to how many agree, while the full-weight
    // consensus rules below decide the band. Keeping every per-input rule
    // this light also keeps the weighted average close to the aggregate
    // centroid, which collapses same-consequent rules to their maximum.
    constexpr double kGradeWeight = 0.01;
    for (const LinguisticVariable& var : rb.inputs) {
        for (const Term& term : var.terms) {
            Rule rule;
            rule.weight = kGradeWeight;
            rule.or_groups = {{Clause{var.name, term.label, false}}};
            rule.consequent_term = grade_consequent(term.label);
            rb.rules.push_back(std::move(rule));
        }
    }

    // Every input at its best: full-weight Progression.
    Rule all_vg;
    all_vg.consequent_term = "Progression";
    all_vg.or_groups.emplace_back();
    for (const LinguisticVariable& var : rb.inputs) {
        all_vg.or_groups.front().push_back(Clause{var.name, "VG", false});
    }
    rb.rules.push_back(std::move(all_vg));

    // Some input graded G or B while nothing is harmful: the session repeats
    // or gets simplified. The NOT H guards hand these rules off to the
    // Harmfulness rules as any input approaches its harmful range.
    auto worst_grade = [&rb](const std::string& grade, const char* consequent) {
        Rule rule;
        rule.consequent_term = consequent;
        for (const LinguisticVariable& pivot : rb.inputs) {
            if (pivot.find_term(grade) == nullptr) continue;
            std::vector<Clause> group{Clause{pivot.name, grade, false}};
            for (const LinguisticVariable& var : rb.inputs) {
                if (var.find_term("H") != nullptr) {
                    group.push_back(Clause{var.name, "H", true});
                }
            }
            rule.or_groups.push_back(std::move(group));
        }
        rb.rules.push_back(std::move(rule));
    };
    worst_grade("G", "Repetition");
    worst_grade("B", "Simplification");

    // Any harmful input: full-weight Harmfulness.
    Rule any_h;
    any_h.consequent_term = "Harmfulness";
    for (const LinguisticVariable& var : rb.inputs) {
        if (var.find_term("H") != nullptr) {
            any_h.or_groups.push_back({Clause{var.name, "H", false}});
        }
    }
    rb.rules.push_back(std::move(any_h));
    return rb;
}

}  // namespace

const std::string& default_rulebase_text() {
    static const std::string kText = format_rulebase(build_default_rulebase());
    return kText;
}

RuleBase default_rulebase() { return parse_rulebase(default_rulebase_text()); }

AdaptAction classify(double crisp) {
    if (!(crisp >= 0.0 && crisp <= 80.0)) {
        throw DomainError("crisp output " + std::to_string(crisp) +
                          " outside GameProgress range [0,80]");
    }
    if (crisp < 20.0) return AdaptAction::Progression;
    if (crisp < 40.0) return AdaptAction::Repetition;
    if (crisp < 60.0) return AdaptAction::Simplification;
    return AdaptAction::Harmfulness;
}

DifficultyState adapt(const DifficultyState& d, AdaptAction action,
                      const AdaptRates& rates) {
    DifficultyState next = d;
    switch (action) {
        case AdaptAction::Progression:
            next.level += 1;
            next.spawn_radius_max *= rates.progress_radius_factor;
            next.fruit_speed *= rates.progress_speed_factor;
            next.iterations += rates.progress_iterations;
            break;
        case AdaptAction::Repetition:
            break;
        case AdaptAction::Simplification:
            next.spawn_radius_max = std::max(next.spawn_radius_min,
                                             next.spawn_radius_max *
                                                 rates.simplify_radius_factor);
            next.fruit_size *= rates.simplify_fruit_factor;
            next.fruit_speed *= rates.simplify_speed_factor;
            break;
        case AdaptAction::Harmfulness:
            next.halted = true;
            break;
    }
    return next;
}

RuleBase restrict_to_active(const RuleBase& rb,
                            const std::set<std::string>& active_set) {
    RuleBase out;
    out.inputs = rb.inputs;
    out.output = rb.output;
    for (const Rule& rule : rb.rules) {
        Rule kept;
        kept.weight = rule.weight;
        kept.consequent_term = rule.consequent_term;
        for (const auto& group : rule.or_groups) {
            const bool usable = std::all_of(
                group.begin(), group.end(),
                [&](const Clause& c) { return active_set.count(c.variable) != 0; });
            if (usable) kept.or_groups.push_back(group);
        }
        if (!kept.or_groups.empty()) out.rules.push_back(std::move(kept));
    }
    return out;
}

DecisionRecord run_controller(const SessionTrace& trace, const DifficultyState& d,
                              const RuleBase& rb,
                              const std::set<std::string>& active_set,
                              const AdaptRates& rates) {
    DecisionRecord rec;
    rec.inputs = build_fuzzy_inputs(trace, active_set);
    const RuleBase active_rb = restrict_to_active(rb, active_set);
    const InferenceResult res = infer(active_rb, rec.inputs);
    rec.crisp = res.crisp;
    rec.action = classify(res.crisp);
    rec.before = d;
    rec.after = adapt(d, rec.action, rates);
    rec.timestamp = trace.frames.empty() ? 0.0 : trace.frames.back().t;
    return rec;
}

}  // namespace rehab

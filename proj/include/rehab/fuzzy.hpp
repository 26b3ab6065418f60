#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "rehab/errors.hpp"

namespace rehab {

// Triangle (alpha, beta, gamma): feet at alpha and gamma, peak at beta.
// Degenerate edges (alpha == beta or beta == gamma) form shoulder terms at
// universe boundaries.
struct TriangularMF {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

double mf_eval(const TriangularMF& mf, double x);

// Centroid of the triangle; beta for a degenerate point set.
double term_centroid(const TriangularMF& mf);

struct Term {
    std::string label;
    TriangularMF mf;
};

struct LinguisticVariable {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<Term> terms;

    const Term* find_term(const std::string& label) const;
    double clamp(double x) const { return std::clamp(x, lo, hi); }
};

// Degree of every term at x (clamped to the universe first).
std::map<std::string, double> fuzzify(const LinguisticVariable& var, double x);

// Maximal subintervals of [lo, hi] where every term's membership is zero.
// Empty for fully covered variables.
std::vector<std::pair<double, double>> coverage_gaps(const LinguisticVariable& var);

inline double t_norm(double a, double b) { return std::min(a, b); }   // AND
inline double s_norm(double a, double b) { return std::max(a, b); }   // OR
inline double negate(double a) { return 1.0 - a; }                    // NOT

struct Clause {
    std::string variable;
    std::string term;
    bool negated = false;

    bool operator==(const Clause&) const = default;
};

// Antecedent in disjunctive normal form: OR over groups, AND within a group.
// AND binds tighter than OR and both fold left to right, so any mixed
// AND/OR chain flattens into this shape.
struct Rule {
    std::vector<std::vector<Clause>> or_groups;
    std::string consequent_term;
    double weight = 1.0;
};

struct RuleBase {
    std::vector<LinguisticVariable> inputs;
    LinguisticVariable output;
    std::vector<Rule> rules;

    const LinguisticVariable* find_input(const std::string& name) const;
};

// Structural checks: unique names/labels, universes and triangles well
// formed, weights in [0,1], every rule clause resolvable. Coverage holes are
// reported by validate() instead. Throws ConfigError on the first violation.
void check_rulebase(const RuleBase& rb);

using InputValues = std::map<std::string, double>;

// Antecedent fold times rule weight. Throws ConfigError when a referenced
// variable is absent from `inputs`.
double firing_strength(const Rule& rule, const RuleBase& rb,
                       const InputValues& inputs);

struct InferenceResult {
    std::vector<double> firing_strengths;        // per rule, same order
    double crisp = 0.0;                          // inside the output universe
    std::map<std::string, double> term_activations;  // max strength per term
};

// Weighted average of consequent centroids, weights = firing strengths.
// Throws NoRuleFiredError when every strength is zero.
InferenceResult infer(const RuleBase& rb, const InputValues& inputs);

// Classical Mamdani oracle: clip each consequent at its firing strength,
// aggregate by pointwise max over an inclusive uniform grid of `resolution`
// points, return the discrete centroid. Cross-checks infer in tests.
double defuzz_centroid_aggregate(const RuleBase& rb, const InputValues& inputs,
                                 int resolution);

}  // namespace rehab

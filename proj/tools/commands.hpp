/*
 * Copyright 2026 The plmu Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Subcommands of the plmu command-line tool. Kept header-only so the tests
// can drive run() in-process.

#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "plmu/plmu.hpp"

namespace plmu::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kInput = 2, kNonConvergence = 3, kViolation = 4 };

inline constexpr double kGapThreshold = 1e-6;

using nlohmann::json;

struct Common {
    std::string model_path;
    std::string formula_text;
    std::string rho_path;
    double tol = 1e-9;
    std::size_t max_iter = 1'000'000;
    std::string format = "text";
};

struct Inputs {
    Plts model;
    Formula formula = Formula::var("_");
    Valuation rho;
};

inline json read_json_file(const std::string& path, const char* what)
{
    std::ifstream in(path);
    if (!in) throw ModelError(std::string("cannot open ") + what + " file " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ModelError(path + ": " + e.what());
    }
}

/// {"X": {"p": 0.7, "q": "1/4"}, ...}; every state must be given.
inline Valuation valuation_from_json(const json& j, const Plts& m)
{
    if (!j.is_object()) throw ModelError("valuation must be a JSON object");
    Valuation rho;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!is_identifier(it.key())) throw ModelError("bad variable name in valuation: " + it.key());
        if (!it.value().is_object()) throw ModelError("valuation of " + it.key() + " must be an object");
        ValueVector v(m.num_states(), std::numeric_limits<double>::quiet_NaN());
        for (auto e = it.value().begin(); e != it.value().end(); ++e) {
            const std::size_t p = m.state(e.key());
            if (e.value().is_string()) v[p] = static_cast<double>(parse_fraction(e.value().get<std::string>()));
            else if (e.value().is_number()) v[p] = e.value().get<double>();
            else throw ModelError("valuation of " + it.key() + " at " + e.key() + " is not a number");
        }
        for (std::size_t p = 0; p < v.size(); ++p) {
            if (std::isnan(v[p])) throw ModelError("valuation of " + it.key() + " misses state " + m.state_name(p));
            if (v[p] < 0.0 || v[p] > 1.0) throw ModelError("valuation of " + it.key() + " leaves [0,1]");
        }
        rho[it.key()] = std::move(v);
    }
    return rho;
}

inline Inputs load_inputs(const Common& c)
{
    Inputs in;
    in.model = load_plts(c.model_path);
    if (const auto errors = validate(in.model); !errors.empty()) {
        std::string msg = "invalid model " + c.model_path + ":";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ModelError(msg);
    }
    in.formula = normalize(parse(c.formula_text));
    if (!c.rho_path.empty()) in.rho = valuation_from_json(read_json_file(c.rho_path, "valuation"), in.model);
    for (const auto& x : free_vars(in.formula))
        if (!in.rho.count(x)) throw UnboundVariable(x);
    return in;
}

inline EvalOptions eval_options(const Common& c)
{
    EvalOptions o;
    o.tol = c.tol;
    o.max_iter = c.max_iter;
    return o;
}

inline IterationOptions iteration_options(const Common& c)
{
    IterationOptions o;
    o.tol = c.tol;
    o.max_iter = c.max_iter;
    return o;
}

inline std::string fmt(double x)
{
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

inline json profile_to_json(const Arena& ar, const Profile& prof)
{
    json out = json::object();
    for (std::size_t s = 0; s < ar.size(); ++s)
        if (prof.choice[s]) out[ar[s].name] = ar[*prof.choice[s]].name;
    return out;
}

/// {"(p,F1)": "(p.a.0,F2)", ...}; unlisted player states take their first successor.
inline Profile profile_from_json(const Arena& ar, const json& j)
{
    if (!j.is_object()) throw ModelError("profile must be a JSON object");
    std::map<std::string, std::size_t> by_name;
    for (std::size_t s = 0; s < ar.size(); ++s) by_name[ar[s].name] = s;
    Profile prof = first_choice_profile(ar);
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto from = by_name.find(it.key());
        if (from == by_name.end()) throw ModelError("profile names unknown arena state " + it.key());
        if (!it.value().is_string()) throw ModelError("profile choice at " + it.key() + " must be a state name");
        const auto to = by_name.find(it.value().get<std::string>());
        if (to == by_name.end()) throw ModelError("profile names unknown arena state " + it.value().get<std::string>());
        if (!prof.choice[from->second]) throw ModelError("profile chooses at non-player state " + it.key());
        prof.choice[from->second] = to->second;
    }
    check_profile(ar, prof);
    return prof;
}

// ---------------------------------------------------------------------------

inline int cmd_eval(const Common& c, std::ostream& out)
{
    const Inputs in = load_inputs(c);
    const ValueVector v = evaluate(in.formula, in.model, in.rho, eval_options(c));
    if (c.format == "json") {
        json j;
        j["formula"] = to_string(in.formula);
        j["values"] = json::object();
        for (std::size_t p = 0; p < v.size(); ++p) j["values"][in.model.state_name(p)] = v[p];
        out << j.dump(2) << '\n';
    } else {
        for (std::size_t p = 0; p < v.size(); ++p) out << in.model.state_name(p) << ": " << fmt(v[p]) << '\n';
    }
    return kOk;
}

inline int cmd_game(const Common& c, std::ostream& out)
{
    const Inputs in = load_inputs(c);
    const SubformulaTable table(in.formula);
    const Arena ar = build_arena(in.formula, in.model, in.rho);
    if (c.format == "json") {
        json j;
        j["formula"] = to_string(in.formula);
        j["subformulas"] = json::array();
        for (std::size_t i = 0; i < table.size(); ++i) j["subformulas"].push_back(to_string(table.formula(i)));
        j["states"] = json::array();
        for (std::size_t i = 0; i < ar.size(); ++i) {
            const auto& s = ar[i];
            json st{{"id", i}, {"name", s.name}, {"owner", to_string(s.owner)}, {"priority", s.priority},
                    {"successors", s.successors}};
            st["reward"] = s.reward ? json(*s.reward) : json(nullptr);
            if (s.owner == Owner::Nature) {
                st["probabilities"] = json::array();
                for (const auto& p : s.probs)
                    st["probabilities"].push_back(p.exact ? json(format_fraction(*p.exact)) : json(p.value));
            }
            j["states"].push_back(std::move(st));
        }
        out << j.dump(2) << '\n';
    } else {
        dump(out, ar, &table);
    }
    return kOk;
}

struct CheckOptions {
    std::string solver = "both";
    double budget = 1e6;
    std::string witness_state;
    bool timing = false;
};

/// Values of both semantics at every process state, with the gaps between them.
struct CheckReport {
    std::vector<std::string> states;
    ValueVector denotational;
    std::optional<ValueVector> lower, upper, iteration;
    std::optional<double> oracle_residual, iteration_residual;
    double profiles_evaluated = 0;
    std::string oracle_status = "not requested";
    std::optional<std::size_t> witness_state;
    json witnesses;
    json timing_ms = json::object();

    double max_gap() const
    {
        double g = 0.0;
        for (std::size_t p = 0; p < states.size(); ++p) {
            if (lower) g = std::max({g, std::abs(denotational[p] - (*lower)[p]), std::abs((*lower)[p] - (*upper)[p])});
            if (iteration) g = std::max(g, std::abs(denotational[p] - (*iteration)[p]));
            if (iteration && lower) g = std::max(g, std::abs((*iteration)[p] - (*lower)[p]));
        }
        return g;
    }
};

inline CheckReport run_check(const Inputs& in, const Common& c, const CheckOptions& o)
{
    using Clock = std::chrono::steady_clock;
    auto ms_since = [](Clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    };
    if (o.solver != "oracle" && o.solver != "iteration" && o.solver != "both")
        throw Error("unknown solver " + o.solver);

    CheckReport r;
    r.states = in.model.states();
    auto t0 = Clock::now();
    r.denotational = evaluate(in.formula, in.model, in.rho, eval_options(c));
    r.timing_ms["denotational"] = ms_since(t0);

    t0 = Clock::now();
    const Arena ar = build_arena(in.formula, in.model, in.rho);
    r.timing_ms["arena"] = ms_since(t0);

    auto at_starts = [&](const ValueVector& v) {
        ValueVector out;
        for (std::size_t p = 0; p < in.model.num_states(); ++p) out.push_back(v[ar.start(p)]);
        return out;
    };

    if (o.solver != "iteration") {
        const std::size_t wp = o.witness_state.empty() ? 0 : in.model.state(o.witness_state);
        BruteForceOptions bo;
        bo.budget = o.budget;
        t0 = Clock::now();
        try {
            const auto bf = brute_force_values(ar, ar.start(wp), bo);
            r.lower = at_starts(bf.lower);
            r.upper = at_starts(bf.upper);
            r.oracle_residual = std::max(check_functional_fixpoint(ar, bf.lower),
                                         check_functional_fixpoint(ar, bf.upper));
            r.profiles_evaluated = bf.profiles_evaluated;
            r.witness_state = wp;
            r.witnesses = {{"state", in.model.state_name(wp)},
                           {"lower", profile_to_json(ar, bf.lower_witness)},
                           {"upper", profile_to_json(ar, bf.upper_witness)}};
            r.oracle_status = "ok";
        } catch (const BudgetExceeded& e) {
            if (o.solver == "oracle") throw;
            r.oracle_status = std::string("skipped: ") + e.what();
        }
        r.timing_ms["oracle"] = ms_since(t0);
    }
    if (o.solver != "oracle") {
        t0 = Clock::now();
        const ValueVector v = value_iteration(ar, iteration_options(c));
        r.iteration = at_starts(v);
        r.iteration_residual = check_functional_fixpoint(ar, v);
        r.timing_ms["iteration"] = ms_since(t0);
    }
    return r;
}

inline json to_json(const CheckReport& r, const Formula& f, const CheckOptions& o)
{
    json j;
    j["formula"] = to_string(f);
    j["solver"] = o.solver;
    j["oracle"] = r.oracle_status;
    j["states"] = json::array();
    for (std::size_t p = 0; p < r.states.size(); ++p) {
        json s{{"state", r.states[p]}, {"denotational", r.denotational[p]}};
        s["lower"] = r.lower ? json((*r.lower)[p]) : json(nullptr);
        s["upper"] = r.upper ? json((*r.upper)[p]) : json(nullptr);
        s["iteration"] = r.iteration ? json((*r.iteration)[p]) : json(nullptr);
        j["states"].push_back(std::move(s));
    }
    j["max_gap"] = r.max_gap();
    j["threshold"] = kGapThreshold;
    j["residuals"] = {{"oracle", r.oracle_residual ? json(*r.oracle_residual) : json(nullptr)},
                      {"iteration", r.iteration_residual ? json(*r.iteration_residual) : json(nullptr)}};
    j["profiles_evaluated"] = r.profiles_evaluated;
    j["witnesses"] = r.witnesses.is_null() ? json(nullptr) : r.witnesses;
    if (o.timing) j["timing_ms"] = r.timing_ms;
    return j;
}

inline int cmd_check(const Common& c, const CheckOptions& o, std::ostream& out)
{
    const Inputs in = load_inputs(c);
    const CheckReport r = run_check(in, c, o);
    const double gap = r.max_gap();
    if (c.format == "json") {
        out << to_json(r, in.formula, o).dump(2) << '\n';
    } else {
        auto cell = [](const std::optional<ValueVector>& v, std::size_t p) { return v ? fmt((*v)[p]) : "-"; };
        out << "formula: " << in.formula << '\n';
        out << "state\tdenotational\tlower\tupper\titeration\n";
        for (std::size_t p = 0; p < r.states.size(); ++p)
            out << r.states[p] << '\t' << fmt(r.denotational[p]) << '\t' << cell(r.lower, p) << '\t'
                << cell(r.upper, p) << '\t' << cell(r.iteration, p) << '\n';
        out << "oracle: " << r.oracle_status;
        if (r.oracle_residual) out << " (residual " << fmt(*r.oracle_residual) << ", " << r.profiles_evaluated << " profiles)";
        out << '\n';
        if (r.iteration_residual) out << "iteration residual: " << fmt(*r.iteration_residual) << '\n';
        if (o.timing)
            for (auto it = r.timing_ms.begin(); it != r.timing_ms.end(); ++it)
                out << "time " << it.key() << ": " << fmt(it.value().get<double>()) << " ms\n";
        out << "max gap: " << fmt(gap) << (gap <= kGapThreshold ? " (ok)" : " (VIOLATION)") << '\n';
    }
    return gap <= kGapThreshold ? kOk : kViolation;
}

struct SimulateOptions {
    std::string state;
    std::string profile_path;
    std::string witness = "lower";
    std::size_t samples = 10'000;
    std::uint64_t seed = 1;
    double budget = 1e6;
};

inline int cmd_simulate(const Common& c, const SimulateOptions& o, std::ostream& out)
{
    const Inputs in = load_inputs(c);
    const Arena ar = build_arena(in.formula, in.model, in.rho);
    const std::size_t p = o.state.empty() ? 0 : in.model.state(o.state);
    const std::size_t start = ar.start(p);

    Profile prof;
    std::string source;
    if (!o.profile_path.empty()) {
        prof = profile_from_json(ar, read_json_file(o.profile_path, "profile"));
        source = "file";
    } else {
        if (o.witness != "lower" && o.witness != "upper") throw Error("unknown witness " + o.witness);
        BruteForceOptions bo;
        bo.budget = o.budget;
        const auto bf = brute_force_values(ar, start, bo);
        prof = o.witness == "lower" ? bf.lower_witness : bf.upper_witness;
        source = "witness-" + o.witness;
    }
    const InducedChain chain = induce_chain(ar, prof, start);
    const double exact = expected_reward(chain, ar).value;
    const Estimate e = estimate(chain, ar, o.samples, o.seed);
    const double diff = e.mean - exact;
    std::optional<double> z;
    if (e.std_error > 0) z = diff / e.std_error;
    else if (std::abs(diff) <= 1e-12) z = 0.0;

    if (c.format == "json") {
        json j{{"formula", to_string(in.formula)}, {"state", in.model.state_name(p)}, {"profile", source},
               {"samples", e.samples}, {"seed", o.seed}, {"estimate", e.mean}, {"std_error", e.std_error},
               {"expected_reward", exact}};
        j["z"] = z ? json(*z) : json(nullptr);
        out << j.dump(2) << '\n';
    } else {
        out << "formula: " << in.formula << "\nstate: " << in.model.state_name(p) << "\nprofile: " << source
            << "\nestimate: " << fmt(e.mean) << " +- " << fmt(e.std_error) << " (" << e.samples
            << " samples, seed " << o.seed << ")\nexpected reward: " << fmt(exact)
            << "\nz: " << (z ? fmt(*z) : std::string("inf")) << '\n';
    }
    return kOk;
}

struct RandomTestOptions {
    std::size_t count = 200;
    std::uint64_t seed = 1;
    double budget = 1e6;
    InstanceBounds bounds;
};

inline json instance_to_json(const Instance& inst)
{
    json j{{"model", plmu::to_json(inst.model)}, {"formula", to_string(inst.formula)}};
    j["rho"] = json::object();
    for (const auto& [x, v] : inst.rho) {
        j["rho"][x] = json::object();
        for (std::size_t p = 0; p < v.size(); ++p) j["rho"][x][inst.model.state_name(p)] = v[p];
    }
    return j;
}

/// Instances whose profile space exceeds the budget are replaced by the next
/// seed in the stream; the number replaced is reported.
inline int cmd_random_test(const Common& c, const RandomTestOptions& o, std::ostream& out)
{
    CheckOptions co;
    co.budget = o.budget;
    double worst = 0.0;
    std::size_t done = 0, replaced = 0;
    for (std::uint64_t k = 0; done < o.count; ++k) {
        Inputs in;
        const Instance inst = random_instance(derive_seed(o.seed, k), o.bounds);
        in.model = inst.model;
        in.formula = inst.formula;
        in.rho = inst.rho;
        if (profile_space_size(build_arena(in.formula, in.model, in.rho)) > o.budget) {
            ++replaced;
            continue;
        }
        const CheckReport r = run_check(in, c, co);
        const double gap = r.max_gap();
        worst = std::max(worst, gap);
        ++done;
        if (gap > kGapThreshold) {
            json j{{"instance", k}, {"gap", gap}, {"counterexample", instance_to_json(inst)}};
            out << (c.format == "json" ? j.dump(2) : "VIOLATION gap " + fmt(gap) + "\n" + j.dump(2)) << '\n';
            return kViolation;
        }
    }
    if (c.format == "json") {
        out << json{{"count", done}, {"replaced", replaced}, {"seed", o.seed}, {"worst_gap", worst}}.dump(2) << '\n';
    } else {
        out << done << " instances, " << replaced << " replaced over budget, worst gap " << fmt(worst)
            << " (threshold " << fmt(kGapThreshold) << ")\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------

inline void add_common(CLI::App& cmd, Common& c, bool positional_inputs = true)
{
    if (positional_inputs) {
        cmd.add_option("model", c.model_path, "PLTS JSON file")->required();
        cmd.add_option("formula", c.formula_text, "formula text, e.g. \"mu X. <a> X\"")->required();
        cmd.add_option("--rho", c.rho_path, "valuation JSON file for free variables");
    }
    cmd.add_option("--tol", c.tol, "fixpoint convergence tolerance")->capture_default_str();
    cmd.add_option("--max-iter", c.max_iter, "iteration cap per fixpoint")->capture_default_str();
    cmd.add_option("--format", c.format, "output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
}

/// Entry point shared by main() and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Quantitative mu-calculus on probabilistic transition systems", "plmu"};
    app.require_subcommand(1);

    Common c;
    CheckOptions co;
    SimulateOptions so;
    RandomTestOptions ro;

    auto* eval = app.add_subcommand("eval", "denotational value at every state");
    add_common(*eval, c);
    auto* game = app.add_subcommand("game", "dump the parity game arena");
    add_common(*game, c);

    auto* check = app.add_subcommand("check", "compare denotational values with game values");
    add_common(*check, c);
    check->add_option("--solver", co.solver, "game solver")
        ->check(CLI::IsMember({"oracle", "iteration", "both"}))
        ->capture_default_str();
    check->add_option("--budget", co.budget, "profile enumeration budget")->capture_default_str();
    check->add_option("--state", co.witness_state, "state whose witness profiles are reported");
    check->add_flag("--timing", co.timing, "report wall-clock timings");

    auto* sim = app.add_subcommand("simulate", "Monte-Carlo estimate under a profile");
    add_common(*sim, c);
    sim->add_option("--state", so.state, "start state (default: first)");
    sim->add_option("--profile", so.profile_path, "profile JSON file (default: solver witness)");
    sim->add_option("--witness", so.witness, "witness used without --profile")
        ->check(CLI::IsMember({"lower", "upper"}))
        ->capture_default_str();
    sim->add_option("-n,--samples", so.samples, "number of sampled plays")->capture_default_str();
    sim->add_option("--seed", so.seed, "random seed")->capture_default_str();
    sim->add_option("--budget", so.budget, "profile enumeration budget")->capture_default_str();

    auto* rt = app.add_subcommand("random-test", "check random instances");
    add_common(*rt, c, false);
    rt->add_option("--count", ro.count, "number of instances")->capture_default_str();
    rt->add_option("--seed", ro.seed, "random seed")->capture_default_str();
    rt->add_option("--budget", ro.budget, "profile enumeration budget")->capture_default_str();
    rt->add_option("--max-states", ro.bounds.max_states)->capture_default_str();
    rt->add_option("--max-labels", ro.bounds.max_labels)->capture_default_str();
    rt->add_option("--max-branching", ro.bounds.max_branching)->capture_default_str();
    rt->add_option("--max-support", ro.bounds.max_support)->capture_default_str();
    rt->add_option("--max-binders", ro.bounds.max_binders)->capture_default_str();
    rt->add_option("--max-depth", ro.bounds.max_depth)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (eval->parsed()) return cmd_eval(c, out);
        if (game->parsed()) return cmd_game(c, out);
        if (check->parsed()) return cmd_check(c, co, out);
        if (sim->parsed()) return cmd_simulate(c, so, out);
        if (rt->parsed()) return cmd_random_test(c, ro, out);
    } catch (const NonConvergence& e) {
        err << "error: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const Error& e) {
        // Parse, formula, model, valuation and budget errors.
        err << "error: " << e.what() << '\n';
        return kInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}

} // namespace plmu::cli

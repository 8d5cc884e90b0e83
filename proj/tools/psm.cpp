#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psm/errors.hpp"
#include "psm/gen.hpp"
#include "psm/io.hpp"
#include "psm/matching.hpp"
#include "psm/oracle.hpp"
#include "psm/reductions.hpp"
#include "psm/typed.hpp"
#include "psm/worlds.hpp"

using namespace psm;

namespace {

// weighted-matching problems travel positionally; agents have no names
Json wsm_to_json(const WsmProblem& w) {
    Json j;
    j["kind"] = "wsm";
    j["n"] = w.n();
    j["strict"] = w.profile.strict;
    auto tiers = [](const std::vector<AgentOrder>& os) {
        Json arr = Json::array();
        for (const auto& o : os) arr.push_back(o.tiers);
        return arr;
    };
    j["tiers_a"] = tiers(w.profile.of_a);
    j["tiers_b"] = tiers(w.profile.of_b);
    Json ws = Json::array();
    for (const auto& row : w.weights) {
        Json r = Json::array();
        for (const auto& x : row) r.push_back(rat_to_string(x));
        ws.push_back(r);
    }
    j["weights"] = ws;
    return j;
}

WsmProblem wsm_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("tiers_a") || !j.contains("weights"))
        throw InputError("not a weighted-matching document");
    WsmProblem w;
    auto orders = [](const Json& arr) {
        std::vector<AgentOrder> os;
        for (const auto& t : arr) {
            AgentOrder o;
            for (const auto& tier : t) o.tiers.push_back(tier.get<std::vector<int>>());
            os.push_back(std::move(o));
        }
        return os;
    };
    w.profile.of_a = orders(j.at("tiers_a"));
    w.profile.of_b = orders(j.at("tiers_b"));
    w.profile.strict = j.value("strict", false);
    for (const auto& row : j.at("weights")) {
        std::vector<Rat> r;
        for (const auto& x : row) r.push_back(parse_rat(x.get<std::string>()));
        w.weights.push_back(std::move(r));
    }
    w.validate();
    return w;
}

PersuasionInstance persuasion_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("receivers") || !j.contains("payoff"))
        throw InputError("not a persuasion document");
    PersuasionInstance pp;
    pp.worlds = j.at("worlds").get<std::vector<std::string>>();
    for (const auto& x : j.at("prior")) pp.prior.push_back(parse_rat(x.get<std::string>()));
    pp.receivers = j.at("receivers").get<std::vector<std::string>>();
    auto cube = [](const Json& arr) {
        std::vector<std::vector<std::vector<Rat>>> c;
        for (const auto& plane : arr) {
            std::vector<std::vector<Rat>> p;
            for (const auto& row : plane) {
                std::vector<Rat> r;
                for (const auto& x : row) r.push_back(parse_rat(x.get<std::string>()));
                p.push_back(std::move(r));
            }
            c.push_back(std::move(p));
        }
        return c;
    };
    pp.payoff = cube(j.at("payoff"));
    pp.sender = cube(j.at("sender"));
    pp.validate();
    return pp;
}

void emit(const Json& report, bool human) {
    if (!human) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    for (const auto& [key, val] : report.items())
        std::cout << key << ": " << (val.is_string() ? val.get<std::string>() : val.dump())
                  << "\n";
}

void write_or_print(const Json& j, const std::string& out) {
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        save_json_file(out, j);
}

Json witness_json(const Instance& in, const DegeneracyReport& rep) {
    Json arr = Json::array();
    for (const auto& dv : rep.witness) {
        Json e;
        e["side"] = dv.side == Side::A ? "A" : "B";
        e["agent"] = (dv.side == Side::A ? in.side_a : in.side_b)[size_t(dv.agent)];
        const auto& opp = dv.side == Side::A ? in.side_b : in.side_a;
        e["pair"] = {opp[size_t(dv.y)], opp[size_t(dv.yy)]};
        Json vec = Json::array();
        for (const auto& x : dv.vec) vec.push_back(rat_to_string(x));
        e["vector"] = vec;
        arr.push_back(std::move(e));
    }
    return arr;
}

// verify before emitting: every policy we write must pass its own checks
Json public_report(const Instance& in, const PublicPolicy& pol, const Rat& value) {
    Json j;
    j["value"] = rat_to_string(value);
    j["signals"] = pol.signals.size();
    j["stable"] = is_stable_policy(in, pol).ok;
    j["indicative"] = is_indicative(in, pol);
    j["bayes_plausible"] = bayes_plausible(in, pol);
    if (!j["stable"].get<bool>() || !j["indicative"].get<bool>() ||
        !j["bayes_plausible"].get<bool>() || policy_utility(in, pol) != value)
        throw InternalError("emitted policy failed self-verification");
    return j;
}

Json private_report(const Instance& in, const PrivatePolicy& pol, const Rat& value) {
    Json j;
    j["value"] = rat_to_string(value);
    j["signals"] = pol.signals.size();
    j["stable"] = is_stable_policy(in, pol).ok;
    j["indicative"] = is_indicative(in, pol);
    if (!j["stable"].get<bool>() || !j["indicative"].get<bool>() ||
        policy_utility(in, pol) != value)
        throw InternalError("emitted policy failed self-verification");
    return j;
}

struct Opts {
    std::string in, out, policy, mode, kind = "instance";
    bool human = false, non_degeneracy = false;
    int n = 2, worlds = 2, types = 2;
    std::uint64_t seed = 1;
    std::string eps = "1/100";
    int max_worlds = 3, max_types = 5, max_n = 3;
};

int cmd_solve(const Opts& o) {
    Json report;
    report["command"] = "solve";
    report["mode"] = o.mode;
    if (o.mode == "typed-public" || o.mode == "typed-private") {
        TypedInstance ti = typed_from_json(load_json_file(o.in));
        TypedPolicy tp = o.mode == "typed-public" ? solve_public_typed(ti, o.max_types)
                                                  : solve_private_typed(ti, o.max_types);
        auto ex = expand_typed_policy(ti, tp);
        Json pr = ex.is_private
                      ? private_report(ex.instance, ex.priv, tp.value)
                      : public_report(ex.instance, ex.pub, tp.value);
        for (const auto& [k, v] : pr.items()) report[k] = v;
        if (!o.out.empty()) save_json_file(o.out, typed_policy_to_json(ti, tp));
    } else if (o.mode == "worlds-public") {
        Instance in = instance_from_json(load_json_file(o.in));
        if (in.num_worlds() > o.max_worlds)
            throw RegimeError("small-worlds solver requires at most " +
                              std::to_string(o.max_worlds) + " worlds");
        auto sol = solve_public_small_worlds(in, o.max_worlds);
        Json pr = public_report(in, sol.policy, sol.value);
        for (const auto& [k, v] : pr.items()) report[k] = v;
        report["non_degenerate"] = sol.degeneracy.non_degenerate;
        report["heuristic"] = sol.heuristic;
        if (sol.heuristic) {
            report["warning"] =
                "instance is degenerate; value is a lower bound, not certified optimal";
            report["degeneracy_witness"] = witness_json(in, sol.degeneracy);
        }
        if (!o.out.empty()) save_json_file(o.out, policy_to_json(in, sol.policy, sol.value));
    } else if (o.mode == "oracle-public" || o.mode == "oracle-restricted") {
        Instance in = instance_from_json(load_json_file(o.in));
        OracleSolution sol;
        if (o.mode == "oracle-public") {
            sol = solve_oracle_public(in, 2, o.max_n);
        } else {
            if (in.num_worlds() != 2)
                throw RegimeError("restricted oracle requires exactly 2 worlds");
            sol = solve_oracle_restricted(in);
        }
        Json pr = public_report(in, sol.policy, sol.value);
        for (const auto& [k, v] : pr.items()) report[k] = v;
        if (!o.out.empty()) save_json_file(o.out, policy_to_json(in, sol.policy, sol.value));
    } else {
        throw CLI::ValidationError("--mode", "unknown mode '" + o.mode + "'");
    }
    emit(report, o.human);
    return 0;
}

int cmd_check(const Opts& o) {
    Instance in = instance_from_json(load_json_file(o.in));
    Json report;
    report["command"] = "check";
    if (o.non_degeneracy) {
        auto rep = check_non_degenerate(in);
        report["non_degenerate"] = rep.non_degenerate;
        if (!rep.non_degenerate) report["witness"] = witness_json(in, rep);
    }
    if (!o.policy.empty()) {
        Json pj = load_json_file(o.policy);
        Json pc;
        if (policy_json_is_private(pj)) {
            PrivatePolicy pol = private_policy_from_json(in, pj);
            auto st = is_stable_policy(in, pol);
            pc["mode"] = "private";
            pc["stable"] = st.ok;
            if (!st.ok) {
                pc["signal"] = st.signal;
                pc["blocking_pair"] = {in.side_a[size_t(st.pair.first)],
                                       in.side_b[size_t(st.pair.second)]};
            }
            pc["indicative"] = is_indicative(in, pol);
            pc["utility"] = rat_to_string(policy_utility(in, pol));
        } else {
            PublicPolicy pol = public_policy_from_json(in, pj);
            auto st = is_stable_policy(in, pol);
            pc["mode"] = "public";
            pc["stable"] = st.ok;
            if (!st.ok) {
                pc["signal"] = st.signal;
                pc["blocking_pair"] = {in.side_a[size_t(st.pair.first)],
                                       in.side_b[size_t(st.pair.second)]};
            }
            pc["indicative"] = is_indicative(in, pol);
            pc["bayes_plausible"] = bayes_plausible(in, pol);
            pc["utility"] = rat_to_string(policy_utility(in, pol));
        }
        report["policy"] = pc;
    }
    emit(report, o.human);
    return 0;
}

int cmd_gen(const Opts& o) {
    Json j;
    if (o.kind == "instance")
        j = instance_to_json(gen_instance(o.n, o.worlds, o.seed));
    else if (o.kind == "typed")
        j = typed_to_json(gen_typed_instance(o.types, o.worlds, o.seed));
    else if (o.kind == "smti")
        j = smti_to_json(gen_smti_instance(o.n, o.seed));
    else
        throw CLI::ValidationError("--kind", "unknown generator kind '" + o.kind + "'");
    write_or_print(j, o.out);
    return 0;
}

int cmd_perturb(const Opts& o) {
    Instance in = instance_from_json(load_json_file(o.in));
    write_or_print(instance_to_json(perturb(in, parse_rat(o.eps), o.seed)), o.out);
    return 0;
}

int cmd_reduce(const Opts& o) {
    Json doc = load_json_file(o.in);
    if (o.kind == "smti-restrict") {
        auto res = smti_restrict(smti_from_json(doc));
        write_or_print(smti_to_json(res.out), o.out);
        Json report;
        report["command"] = "reduce";
        report["kind"] = o.kind;
        report["duplicated"] = res.a2;
        report["dummies"] = res.a3;
        if (!o.out.empty()) emit(report, o.human);
    } else if (o.kind == "smti-wsm") {
        write_or_print(wsm_to_json(smti_to_wsm(smti_from_json(doc))), o.out);
    } else if (o.kind == "wsm-private") {
        write_or_print(instance_to_json(wsm_to_private_persuasion(wsm_from_json(doc))),
                       o.out);
    } else if (o.kind == "persuasion-matching") {
        write_or_print(instance_to_json(persuasion_to_matching(persuasion_from_json(doc))),
                       o.out);
    } else {
        throw CLI::ValidationError("--kind", "unknown reduction kind '" + o.kind + "'");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact solvers for persuasion over stable matchings"};
    app.require_subcommand(1);
    Opts o;

    auto* solve = app.add_subcommand("solve", "solve an instance under a regime");
    solve->add_option("--in", o.in, "instance file")->required();
    solve->add_option("--out", o.out, "policy output file");
    solve->add_option("--mode", o.mode,
                      "typed-public | typed-private | worlds-public | "
                      "oracle-public | oracle-restricted")
        ->required();

    auto* check = app.add_subcommand("check", "verify policies and degeneracy");
    check->add_option("--in", o.in, "instance file")->required();
    check->add_option("--policy", o.policy, "policy file to verify");
    check->add_flag("--non-degeneracy", o.non_degeneracy, "run the degeneracy check");

    auto* gen = app.add_subcommand("gen", "generate a random instance");
    gen->add_option("--kind", o.kind, "instance | typed | smti");
    gen->add_option("--n", o.n, "agents per side");
    gen->add_option("--worlds", o.worlds, "number of worlds");
    gen->add_option("--types", o.types, "types per side (typed kind)");
    gen->add_option("--seed", o.seed, "rng seed");
    gen->add_option("--out", o.out, "output file (default stdout)");

    auto* perturb = app.add_subcommand("perturb", "add grid noise to agent values");
    perturb->add_option("--in", o.in, "instance file")->required();
    perturb->add_option("--eps", o.eps, "noise magnitude, exact rational");
    perturb->add_option("--seed", o.seed, "rng seed");
    perturb->add_option("--out", o.out, "output file (default stdout)");

    auto* reduce = app.add_subcommand("reduce", "run a reduction");
    reduce->add_option("--in", o.in, "input file")->required();
    reduce->add_option("--kind", o.kind,
                       "smti-restrict | smti-wsm | wsm-private | persuasion-matching")
        ->required();
    reduce->add_option("--out", o.out, "output file (default stdout)");

    for (auto* sub : {solve, check, gen, perturb, reduce}) {
        sub->add_flag("--human", o.human, "tabular output instead of JSON");
        sub->add_option("--max-worlds", o.max_worlds, "world cap for exact solvers");
        sub->add_option("--max-types", o.max_types, "type cap for typed solvers");
        sub->add_option("--max-n", o.max_n, "agent cap for the oracle");
    }

    try {
        app.parse(argc, argv);
        if (solve->parsed()) return cmd_solve(o);
        if (check->parsed()) return cmd_check(o);
        if (gen->parsed()) return cmd_gen(o);
        if (perturb->parsed()) return cmd_perturb(o);
        if (reduce->parsed()) return cmd_reduce(o);
        return 2;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const RegimeError& e) {
        std::cerr << "regime error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

#include "psm/io.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "psm/errors.hpp"

namespace psm {

namespace {

std::string rs(const Rat& v) { return rat_to_string(v); }

Rat rp(const Json& j, const std::string& where) {
    if (j.is_number_integer()) return Rat(Int(j.get<long long>()));
    if (!j.is_string()) throw InputError("expected a rational string at " + where);
    return parse_rat(j.get<std::string>());
}

const Json& field(const Json& j, const std::string& key) {
    if (!j.is_object() || !j.contains(key))
        throw InputError("missing field \"" + key + "\"");
    return j.at(key);
}

std::vector<std::string> str_list(const Json& j, const std::string& key) {
    std::vector<std::string> out;
    for (const auto& e : field(j, key)) {
        if (!e.is_string()) throw InputError("\"" + key + "\" must list strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

using NameIndex = std::function<int(const std::string&)>;

NameIndex indexer(const std::vector<std::string>& names, const std::string& what) {
    std::map<std::string, int> m;
    for (int i = 0; i < int(names.size()); ++i) {
        if (!m.emplace(names[size_t(i)], i).second)
            throw InputError("duplicate " + what + " id: " + names[size_t(i)]);
    }
    return [m, what](const std::string& id) {
        auto it = m.find(id);
        if (it == m.end()) throw InputError("unknown " + what + " id: " + id);
        return it->second;
    };
}

std::vector<Rat> world_row(const Json& j, const std::vector<std::string>& worlds,
                           const std::string& where) {
    std::vector<Rat> row;
    for (const auto& w : worlds) row.push_back(rp(field(j, w), where + "/" + w));
    return row;
}

Json world_row_json(const std::vector<std::string>& worlds, const std::vector<Rat>& row) {
    Json j = Json::object();
    for (size_t w = 0; w < worlds.size(); ++w) j[worlds[w]] = rs(row[w]);
    return j;
}

Json order_to_json(const AgentOrder& o, const std::vector<std::string>& names) {
    Json tiers = Json::array();
    for (const auto& tier : o.tiers) {
        Json t = Json::array();
        for (int y : tier) t.push_back(names.at(size_t(y)));
        tiers.push_back(t);
    }
    return tiers;
}

AgentOrder order_from_json(const Json& j, const NameIndex& idx) {
    AgentOrder o;
    if (!j.is_array()) throw InputError("preference order must be a list of tiers");
    for (const auto& tier : j) {
        std::vector<int> t;
        for (const auto& id : tier) t.push_back(idx(id.get<std::string>()));
        o.tiers.push_back(std::move(t));
    }
    return o;
}

Json profile_to_json(const Instance& inst, const PreferenceProfile& prof) {
    Json a = Json::object(), b = Json::object();
    for (int i = 0; i < inst.n(); ++i) {
        a[inst.side_a[size_t(i)]] = order_to_json(prof.of_a[size_t(i)], inst.side_b);
        b[inst.side_b[size_t(i)]] = order_to_json(prof.of_b[size_t(i)], inst.side_a);
    }
    return Json{{"a", a}, {"b", b}};
}

PreferenceProfile profile_from_json(const Instance& inst, const Json& j) {
    NameIndex ai = indexer(inst.side_a, "agent"), bi = indexer(inst.side_b, "agent");
    PreferenceProfile prof;
    for (const auto& id : inst.side_a)
        prof.of_a.push_back(order_from_json(field(field(j, "a"), id), bi));
    for (const auto& id : inst.side_b)
        prof.of_b.push_back(order_from_json(field(field(j, "b"), id), ai));
    prof.strict = true;
    for (const auto& o : prof.of_a) prof.strict = prof.strict && o.strict();
    for (const auto& o : prof.of_b) prof.strict = prof.strict && o.strict();
    return prof;
}

Json matching_to_json(const Instance& inst, const Matching& m) {
    Json j = Json::object();
    for (int i = 0; i < inst.n(); ++i)
        j[inst.side_a[size_t(i)]] = inst.side_b.at(size_t(m.a_to_b[size_t(i)]));
    return j;
}

Matching matching_from_json(const Instance& inst, const Json& j) {
    NameIndex bi = indexer(inst.side_b, "agent");
    Matching m;
    for (const auto& id : inst.side_a)
        m.a_to_b.push_back(bi(field(j, id).get<std::string>()));
    m.b_to_a();  // validates bijection
    return m;
}

}  // namespace

Json instance_to_json(const Instance& inst) {
    Json j;
    j["worlds"] = inst.worlds;
    Json prior = Json::object();
    for (int w = 0; w < inst.num_worlds(); ++w)
        prior[inst.worlds[size_t(w)]] = rs(inst.prior[size_t(w)]);
    j["prior"] = prior;
    j["side_a"] = inst.side_a;
    j["side_b"] = inst.side_b;
    Json values = Json::object();
    for (int i = 0; i < inst.n(); ++i) {
        Json per = Json::object();
        for (int k = 0; k < inst.n(); ++k)
            per[inst.side_b[size_t(k)]] =
                world_row_json(inst.worlds, inst.val_a[size_t(i)][size_t(k)]);
        values[inst.side_a[size_t(i)]] = per;
    }
    for (int i = 0; i < inst.n(); ++i) {
        Json per = Json::object();
        for (int k = 0; k < inst.n(); ++k)
            per[inst.side_a[size_t(k)]] =
                world_row_json(inst.worlds, inst.val_b[size_t(i)][size_t(k)]);
        values[inst.side_b[size_t(i)]] = per;
    }
    j["values"] = values;
    Json utils = Json::object();
    for (int i = 0; i < inst.n(); ++i) {
        Json per = Json::object();
        for (int k = 0; k < inst.n(); ++k)
            per[inst.side_b[size_t(k)]] =
                world_row_json(inst.worlds, inst.util[size_t(i)][size_t(k)]);
        utils[inst.side_a[size_t(i)]] = per;
    }
    j["utilities"] = utils;
    return j;
}

Instance instance_from_json(const Json& j) {
    Instance inst;
    inst.worlds = str_list(j, "worlds");
    inst.side_a = str_list(j, "side_a");
    inst.side_b = str_list(j, "side_b");
    indexer(inst.worlds, "world");
    std::vector<std::string> all = inst.side_a;
    all.insert(all.end(), inst.side_b.begin(), inst.side_b.end());
    indexer(all, "agent");  // ids must be globally unique in the flat values map
    const Json& prior = field(j, "prior");
    for (const auto& w : inst.worlds) inst.prior.push_back(rp(field(prior, w), "prior"));
    const Json& values = field(j, "values");
    const Json& utils = field(j, "utilities");
    int n = int(inst.side_a.size());
    auto cube = [&](const std::vector<std::string>& rows,
                    const std::vector<std::string>& cols, const Json& src) {
        std::vector<std::vector<std::vector<Rat>>> c;
        for (const auto& r : rows) {
            c.push_back({});
            const Json& per = field(src, r);
            for (const auto& col : cols)
                c.back().push_back(world_row(field(per, col), inst.worlds, r));
        }
        return c;
    };
    inst.val_a = cube(inst.side_a, inst.side_b, values);
    inst.val_b = cube(inst.side_b, inst.side_a, values);
    inst.util = cube(inst.side_a, inst.side_b, utils);
    (void)n;
    inst.validate();
    return inst;
}

Json typed_to_json(const TypedInstance& ti) {
    Json j;
    j["worlds"] = ti.worlds;
    Json prior = Json::object();
    for (int w = 0; w < ti.num_worlds(); ++w) prior[ti.worlds[size_t(w)]] = rs(ti.prior[size_t(w)]);
    j["prior"] = prior;
    Json ta = Json::object(), tb = Json::object();
    for (int s = 0; s < ti.ta(); ++s) ta[ti.a_types[size_t(s)]] = ti.a_sizes[size_t(s)].str();
    for (int t = 0; t < ti.tb(); ++t) tb[ti.b_types[size_t(t)]] = ti.b_sizes[size_t(t)].str();
    j["types"] = Json{{"a", ta}, {"b", tb}};
    Json values = Json::object();
    for (int s = 0; s < ti.ta(); ++s) {
        Json per = Json::object();
        for (int t = 0; t < ti.tb(); ++t)
            per[ti.b_types[size_t(t)]] = world_row_json(ti.worlds, ti.val_a[size_t(s)][size_t(t)]);
        values[ti.a_types[size_t(s)]] = per;
    }
    for (int t = 0; t < ti.tb(); ++t) {
        Json per = Json::object();
        for (int s = 0; s < ti.ta(); ++s)
            per[ti.a_types[size_t(s)]] = world_row_json(ti.worlds, ti.val_b[size_t(t)][size_t(s)]);
        values[ti.b_types[size_t(t)]] = per;
    }
    j["values"] = values;
    Json utils = Json::object();
    for (int s = 0; s < ti.ta(); ++s) {
        Json per = Json::object();
        for (int t = 0; t < ti.tb(); ++t)
            per[ti.b_types[size_t(t)]] = world_row_json(ti.worlds, ti.util[size_t(s)][size_t(t)]);
        utils[ti.a_types[size_t(s)]] = per;
    }
    j["utilities"] = utils;
    return j;
}

TypedInstance typed_from_json(const Json& j) {
    TypedInstance ti;
    ti.worlds = str_list(j, "worlds");
    const Json& prior = field(j, "prior");
    for (const auto& w : ti.worlds) ti.prior.push_back(rp(field(prior, w), "prior"));
    const Json& types = field(j, "types");
    for (const auto& [name, sz] : field(types, "a").items()) {
        ti.a_types.push_back(name);
        ti.a_sizes.push_back(Int(sz.is_string() ? sz.get<std::string>()
                                                : std::to_string(sz.get<long long>())));
    }
    for (const auto& [name, sz] : field(types, "b").items()) {
        ti.b_types.push_back(name);
        ti.b_sizes.push_back(Int(sz.is_string() ? sz.get<std::string>()
                                                : std::to_string(sz.get<long long>())));
    }
    std::vector<std::string> all = ti.a_types;
    all.insert(all.end(), ti.b_types.begin(), ti.b_types.end());
    indexer(all, "type");
    const Json& values = field(j, "values");
    const Json& utils = field(j, "utilities");
    auto cube = [&](const std::vector<std::string>& rows,
                    const std::vector<std::string>& cols, const Json& src) {
        std::vector<std::vector<std::vector<Rat>>> c;
        for (const auto& r : rows) {
            c.push_back({});
            const Json& per = field(src, r);
            for (const auto& col : cols)
                c.back().push_back(world_row(field(per, col), ti.worlds, r));
        }
        return c;
    };
    ti.val_a = cube(ti.a_types, ti.b_types, values);
    ti.val_b = cube(ti.b_types, ti.a_types, values);
    ti.util = cube(ti.a_types, ti.b_types, utils);
    ti.validate();
    return ti;
}

Json smti_to_json(const SmtiInstance& m) {
    Json j;
    j["side_a"] = m.side_a;
    j["side_b"] = m.side_b;
    Json prefs = Json::object();
    for (int i = 0; i < m.na(); ++i) {
        Json lst = Json::array();
        for (int b : m.prefs_a[size_t(i)]) lst.push_back(m.side_b.at(size_t(b)));
        prefs[m.side_a[size_t(i)]] = lst;
    }
    for (int i = 0; i < m.nb(); ++i) {
        Json lst = Json::array();
        for (int a : m.prefs_b[size_t(i)]) lst.push_back(m.side_a.at(size_t(a)));
        prefs[m.side_b[size_t(i)]] = lst;
    }
    j["prefs"] = prefs;
    Json ties = Json::object();
    for (int i = 0; i < m.na(); ++i) {
        if (m.ties_a[size_t(i)].empty()) continue;
        Json t = Json::array();
        for (int b : m.ties_a[size_t(i)]) t.push_back(m.side_b.at(size_t(b)));
        ties[m.side_a[size_t(i)]] = t;
    }
    j["ties"] = ties;
    return j;
}

SmtiInstance smti_from_json(const Json& j) {
    SmtiInstance m;
    m.side_a = str_list(j, "side_a");
    m.side_b = str_list(j, "side_b");
    NameIndex ai = indexer(m.side_a, "agent"), bi = indexer(m.side_b, "agent");
    const Json& prefs = field(j, "prefs");
    for (const auto& id : m.side_a) {
        std::vector<int> lst;
        for (const auto& b : field(prefs, id)) lst.push_back(bi(b.get<std::string>()));
        m.prefs_a.push_back(std::move(lst));
    }
    for (const auto& id : m.side_b) {
        std::vector<int> lst;
        for (const auto& a : field(prefs, id)) lst.push_back(ai(a.get<std::string>()));
        m.prefs_b.push_back(std::move(lst));
    }
    m.ties_a.assign(size_t(m.na()), {});
    if (j.contains("ties")) {
        for (const auto& [id, t] : j.at("ties").items()) {
            std::vector<int> tie;
            for (const auto& b : t) tie.push_back(bi(b.get<std::string>()));
            m.ties_a[size_t(ai(id))] = std::move(tie);
        }
    }
    m.validate();
    return m;
}

Json policy_to_json(const Instance& inst, const PublicPolicy& pol, const Rat& utility) {
    Json j;
    j["mode"] = "public";
    Json sigs = Json::array();
    for (size_t s = 0; s < pol.signals.size(); ++s) {
        Json sig;
        sig["tag"] = pol.signals[s].tag;
        sig["profile"] = profile_to_json(inst, pol.signals[s].profile);
        sig["matching"] = matching_to_json(inst, pol.signals[s].matching);
        sig["kernel"] = world_row_json(inst.worlds, pol.kernel[s]);
        sigs.push_back(sig);
    }
    j["signals"] = sigs;
    j["utility"] = rs(utility);
    return j;
}

Json policy_to_json(const Instance& inst, const PrivatePolicy& pol, const Rat& utility) {
    Json j;
    j["mode"] = "private";
    Json sigs = Json::array();
    for (size_t s = 0; s < pol.signals.size(); ++s) {
        const JointSignal& js = pol.signals[s];
        Json sig;
        sig["tag"] = js.tag;
        Json a = Json::object(), b = Json::object();
        for (int i = 0; i < inst.n(); ++i) {
            a[inst.side_a[size_t(i)]] = order_to_json(js.comp_a[size_t(i)], inst.side_b);
            b[inst.side_b[size_t(i)]] = order_to_json(js.comp_b[size_t(i)], inst.side_a);
        }
        sig["joint_signal"] = Json{{"a", a}, {"b", b}};
        sig["matching"] = matching_to_json(inst, js.matching);
        sig["kernel"] = world_row_json(inst.worlds, pol.kernel[s]);
        sigs.push_back(sig);
    }
    j["signals"] = sigs;
    j["utility"] = rs(utility);
    return j;
}

bool policy_json_is_private(const Json& j) {
    const Json& m = field(j, "mode");
    if (m == "public") return false;
    if (m == "private") return true;
    throw InputError("policy mode must be \"public\" or \"private\"");
}

PublicPolicy public_policy_from_json(const Instance& inst, const Json& j) {
    if (policy_json_is_private(j)) throw InputError("expected a public policy file");
    PublicPolicy pol;
    for (const auto& sig : field(j, "signals")) {
        MetaSignal ms;
        ms.tag = sig.contains("tag") ? sig.at("tag").get<std::string>() : "";
        ms.profile = profile_from_json(inst, field(sig, "profile"));
        ms.matching = matching_from_json(inst, field(sig, "matching"));
        pol.signals.push_back(std::move(ms));
        pol.kernel.push_back(world_row(field(sig, "kernel"), inst.worlds, "kernel"));
    }
    return pol;
}

PrivatePolicy private_policy_from_json(const Instance& inst, const Json& j) {
    if (!policy_json_is_private(j)) throw InputError("expected a private policy file");
    NameIndex ai = indexer(inst.side_a, "agent"), bi = indexer(inst.side_b, "agent");
    PrivatePolicy pol;
    for (const auto& sig : field(j, "signals")) {
        JointSignal js;
        js.tag = sig.contains("tag") ? sig.at("tag").get<std::string>() : "";
        const Json& comp = field(sig, "joint_signal");
        for (const auto& id : inst.side_a)
            js.comp_a.push_back(order_from_json(field(field(comp, "a"), id), bi));
        for (const auto& id : inst.side_b)
            js.comp_b.push_back(order_from_json(field(field(comp, "b"), id), ai));
        js.matching = matching_from_json(inst, field(sig, "matching"));
        pol.signals.push_back(std::move(js));
        pol.kernel.push_back(world_row(field(sig, "kernel"), inst.worlds, "kernel"));
    }
    return pol;
}

namespace {

Json counts_to_json(const TypedInstance& ti, const PrototypeMatching& m) {
    Json j = Json::object();
    for (int s = 0; s < ti.ta(); ++s) {
        Json per = Json::object();
        for (int t = 0; t < ti.tb(); ++t)
            per[ti.b_types[size_t(t)]] = m.counts[size_t(s)][size_t(t)].str();
        j[ti.a_types[size_t(s)]] = per;
    }
    return j;
}

PrototypeMatching counts_from_json(const TypedInstance& ti, const Json& j) {
    PrototypeMatching m;
    for (int s = 0; s < ti.ta(); ++s) {
        m.counts.push_back({});
        const Json& per = field(j, ti.a_types[size_t(s)]);
        for (int t = 0; t < ti.tb(); ++t) {
            const Json& c = field(per, ti.b_types[size_t(t)]);
            m.counts.back().push_back(Int(c.is_string()
                                              ? c.get<std::string>()
                                              : std::to_string(c.get<long long>())));
        }
    }
    return m;
}

}  // namespace

Json typed_policy_to_json(const TypedInstance& ti, const TypedPolicy& tp) {
    Json j;
    j["mode"] = tp.is_private ? "typed-private" : "typed-public";
    Json sigs = Json::array();
    for (size_t s = 0; s < tp.signals.size(); ++s) {
        const TypedMetaSignal& ms = tp.signals[s];
        Json sig;
        sig["tag"] = ms.tag;
        if (!tp.is_private) {
            Json a = Json::object(), b = Json::object();
            for (int t = 0; t < ti.ta(); ++t)
                a[ti.a_types[size_t(t)]] = order_to_json(ms.order_a[size_t(t)], ti.b_types);
            for (int t = 0; t < ti.tb(); ++t)
                b[ti.b_types[size_t(t)]] = order_to_json(ms.order_b[size_t(t)], ti.a_types);
            sig["profile"] = Json{{"a", a}, {"b", b}};
        } else {
            Json a = Json::object(), b = Json::object();
            for (const auto& [key, o] : ms.comp_a)
                a[ti.a_types[size_t(key.first)]][ti.b_types[size_t(key.second)]] =
                    order_to_json(o, ti.b_types);
            for (const auto& [key, o] : ms.comp_b)
                b[ti.b_types[size_t(key.first)]][ti.a_types[size_t(key.second)]] =
                    order_to_json(o, ti.a_types);
            sig["components"] = Json{{"a", a}, {"b", b}};
        }
        sig["matching"] = counts_to_json(ti, ms.matching);
        sig["kernel"] = world_row_json(ti.worlds, tp.kernel[s]);
        sigs.push_back(sig);
    }
    j["signals"] = sigs;
    j["utility"] = rs(tp.value);
    return j;
}

TypedPolicy typed_policy_from_json(const TypedInstance& ti, const Json& j) {
    TypedPolicy tp;
    const Json& mode = field(j, "mode");
    if (mode == "typed-private")
        tp.is_private = true;
    else if (mode != "typed-public")
        throw InputError("typed policy mode must be typed-public or typed-private");
    NameIndex ai = indexer(ti.a_types, "type"), bi = indexer(ti.b_types, "type");
    for (const auto& sig : field(j, "signals")) {
        TypedMetaSignal ms;
        ms.tag = sig.contains("tag") ? sig.at("tag").get<std::string>() : "";
        if (!tp.is_private) {
            const Json& prof = field(sig, "profile");
            for (const auto& id : ti.a_types)
                ms.order_a.push_back(order_from_json(field(field(prof, "a"), id), bi));
            for (const auto& id : ti.b_types)
                ms.order_b.push_back(order_from_json(field(field(prof, "b"), id), ai));
        } else {
            const Json& comp = field(sig, "components");
            for (const auto& [own, per] : field(comp, "a").items())
                for (const auto& [partner, o] : per.items())
                    ms.comp_a[{ai(own), bi(partner)}] = order_from_json(o, bi);
            for (const auto& [own, per] : field(comp, "b").items())
                for (const auto& [partner, o] : per.items())
                    ms.comp_b[{bi(own), ai(partner)}] = order_from_json(o, ai);
        }
        ms.matching = counts_from_json(ti, field(sig, "matching"));
        tp.signals.push_back(std::move(ms));
        tp.kernel.push_back(world_row(field(sig, "kernel"), ti.worlds, "kernel"));
    }
    tp.value = rp(field(j, "utility"), "utility");
    return tp;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace psm

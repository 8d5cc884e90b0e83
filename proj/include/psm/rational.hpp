#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "psm/errors.hpp"

namespace psm {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

// Canonical form: "p" when the denominator is 1, else "p/q" in lowest terms.
inline std::string rat_to_string(const Rat& r) {
    if (rat_den(r) == 1) return rat_num(r).str();
    return rat_num(r).str() + "/" + rat_den(r).str();
}

// Parses "p/q", "p", or a decimal string like "-0.25". Exact; no rounding.
inline Rat parse_rat(const std::string& s) {
    if (s.empty()) throw InputError("empty rational literal");
    auto bad = [&] { throw InputError("bad rational literal: '" + s + "'"); };
    auto is_int = [](const std::string& t) {
        if (t.empty()) return false;
        size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string p = s.substr(0, slash), q = s.substr(slash + 1);
        if (!is_int(p) || !is_int(q)) bad();
        Int den(q);
        if (den == 0) throw InputError("zero denominator: '" + s + "'");
        return Rat(Int(p), den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        if (!is_int(s)) bad();
        return Rat(Int(s));
    }
    std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    if (!is_int(whole) || frac.empty()) bad();
    for (char c : frac)
        if (!isdigit(static_cast<unsigned char>(c))) bad();
    Int scale = 1;
    for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rat result = Rat(Int(whole)) + (neg ? -1 : 1) * Rat(Int(frac), scale);
    return result;
}

}  // namespace psm

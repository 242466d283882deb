#include "obata/exact.hpp"

#include "obata/common.hpp"

#include <cmath>
#include <sstream>

namespace obata {

TrigRational::TrigRational(const Rational& q) {
    if (q != 0) terms_[{0, 0}] = q;
}

TrigRational TrigRational::monomial(const Rational& q, int i, int j) {
    require(i == 0 || i == 1, "sine power must be 0 or 1 in canonical form");
    TrigRational t;
    t.add_term(i, j, q);
    return t;
}

void TrigRational::add_term(int i, int j, const Rational& q) {
    if (q == 0) return;
    if (i >= 2) {
        // s^2 = 1 - c^2
        add_term(i - 2, j, q);
        add_term(i - 2, j + 2, -q);
        return;
    }
    auto [it, inserted] = terms_.try_emplace({i, j}, q);
    if (!inserted) {
        it->second += q;
        if (it->second == 0) terms_.erase(it);
    }
}

double TrigRational::evaluate(double theta) const {
    const double s = std::sin(theta), c = std::cos(theta);
    double total = 0;
    for (const auto& [key, q] : terms_)
        total += static_cast<double>(q) * (key.first ? s : 1.0) * std::pow(c, key.second);
    return total;
}

std::string TrigRational::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [key, q] : terms_) {
        if (!first) out << " + ";
        first = false;
        out << "(" << q << ")";
        if (key.first) out << "*sin(theta)";
        if (key.second == 1) out << "*cos(theta)";
        if (key.second != 0 && key.second != 1) out << "*cos(theta)^" << key.second;
    }
    return out.str();
}

TrigRational TrigRational::operator-() const {
    TrigRational t(*this);
    for (auto& kv : t.terms_) kv.second = -kv.second;
    return t;
}

TrigRational& TrigRational::operator+=(const TrigRational& o) {
    for (const auto& [key, q] : o.terms_) add_term(key.first, key.second, q);
    return *this;
}

TrigRational& TrigRational::operator-=(const TrigRational& o) {
    for (const auto& [key, q] : o.terms_) add_term(key.first, key.second, -q);
    return *this;
}

TrigRational& TrigRational::operator*=(const TrigRational& o) {
    TrigRational out;
    for (const auto& [ka, qa] : terms_)
        for (const auto& [kb, qb] : o.terms_) out.add_term(ka.first + kb.first, ka.second + kb.second, qa * qb);
    terms_ = std::move(out.terms_);
    return *this;
}

TrigRational& TrigRational::operator/=(const TrigRational& o) {
    if (!o.is_monomial() || o.terms_.begin()->first.first != 0)
        throw ParameterError("exact division is only defined by monomials q * c^j");
    const auto& [key, q] = *o.terms_.begin();
    TrigRational out;
    for (const auto& [k, v] : terms_) out.add_term(k.first, k.second - key.second, v / q);
    terms_ = std::move(out.terms_);
    return *this;
}

}  // namespace obata

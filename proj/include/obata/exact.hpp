#pragma once

// Exact arithmetic in Q[sin t, cos t, 1/cos t]: finite sums q * s^i * c^j with
// q rational, i in {0, 1}, j any integer, and s^2 reduced to 1 - c^2.

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <string>
#include <utility>

namespace obata {

using Rational = boost::multiprecision::cpp_rational;

class TrigRational {
public:
    TrigRational() = default;
    TrigRational(long v) : TrigRational(Rational(v)) {}  // NOLINT(google-explicit-constructor)
    TrigRational(const Rational& q);                     // NOLINT(google-explicit-constructor)

    /// q * s^i * c^j.
    static TrigRational monomial(const Rational& q, int i, int j);
    static TrigRational sin() { return monomial(1, 1, 0); }
    static TrigRational cos() { return monomial(1, 0, 1); }

    bool is_zero() const { return terms_.empty(); }
    /// Single term q * s^i * c^j with q != 0.
    bool is_monomial() const { return terms_.size() == 1; }
    double evaluate(double theta) const;
    std::string str() const;

    TrigRational operator-() const;
    TrigRational& operator+=(const TrigRational& o);
    TrigRational& operator-=(const TrigRational& o);
    TrigRational& operator*=(const TrigRational& o);
    /// Division by a monomial; throws ParameterError otherwise.
    TrigRational& operator/=(const TrigRational& o);

    friend TrigRational operator+(TrigRational a, const TrigRational& b) { return a += b; }
    friend TrigRational operator-(TrigRational a, const TrigRational& b) { return a -= b; }
    friend TrigRational operator*(TrigRational a, const TrigRational& b) { return a *= b; }
    friend TrigRational operator/(TrigRational a, const TrigRational& b) { return a /= b; }
    friend bool operator==(const TrigRational& a, const TrigRational& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const TrigRational& a, const TrigRational& b) { return !(a == b); }

private:
    using Key = std::pair<int, int>;
    void add_term(int i, int j, const Rational& q);

    std::map<Key, Rational> terms_;
};

}  // namespace obata

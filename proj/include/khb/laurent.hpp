#pragma once

#include <map>
#include <sstream>
#include <string>

namespace khb {

// Laurent polynomial in q with integer coefficients.
class Laurent {
public:
  Laurent() = default;
  static Laurent term(int exp, long long coeff = 1) {
    Laurent p;
    p.add(exp, coeff);
    return p;
  }

  void add(int exp, long long coeff) {
    if (coeff == 0) return;
    auto it = c_.find(exp);
    if (it == c_.end()) c_[exp] = coeff;
    else {
      it->second += coeff;
      if (it->second == 0) c_.erase(it);
    }
  }

  Laurent operator+(const Laurent& o) const {
    Laurent out = *this;
    for (auto& [e, c] : o.c_) out.add(e, c);
    return out;
  }
  Laurent operator-(const Laurent& o) const {
    Laurent out = *this;
    for (auto& [e, c] : o.c_) out.add(e, -c);
    return out;
  }
  Laurent operator*(const Laurent& o) const {
    Laurent out;
    for (auto& [e1, c1] : c_)
      for (auto& [e2, c2] : o.c_) out.add(e1 + e2, c1 * c2);
    return out;
  }
  bool operator==(const Laurent& o) const { return c_ == o.c_; }
  bool is_zero() const { return c_.empty(); }

  const std::map<int, long long>& coeffs() const { return c_; }

  std::string str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [e, c] : c_) {
      if (!first) os << (c > 0 ? " + " : " - ");
      else if (c < 0) os << "-";
      long long a = c > 0 ? c : -c;
      if (a != 1 || e == 0) os << a;
      if (e != 0) {
        if (a != 1) os << "*";
        os << "q";
        if (e != 1) os << "^" << e;
      }
      first = false;
    }
    return os.str();
  }

private:
  std::map<int, long long> c_;
};

}  // namespace khb

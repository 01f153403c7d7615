#include "gasper/rational.hpp"

#include <cctype>
#include <cmath>

namespace gasper {

namespace {

using int_t = rational::int_t;

int_t mul(int_t a, int_t b) {
   int_t r;
   if (__builtin_mul_overflow(a, b, &r))
      throw arithmetic_overflow("rational multiply overflow");
   return r;
}

int_t add(int_t a, int_t b) {
   int_t r;
   if (__builtin_add_overflow(a, b, &r))
      throw arithmetic_overflow("rational add overflow");
   return r;
}

int_t abs128(int_t a) { return a < 0 ? -a : a; }

int_t gcd(int_t a, int_t b) {
   a = abs128(a);
   b = abs128(b);
   while (b != 0) {
      int_t t = a % b;
      a = b;
      b = t;
   }
   return a;
}

std::string to_string(int_t v) {
   if (v == 0) return "0";
   bool neg = v < 0;
   std::string s;
   while (v != 0) {
      int d = static_cast<int>(v % 10);
      s.push_back(static_cast<char>('0' + (d < 0 ? -d : d)));
      v /= 10;
   }
   if (neg) s.push_back('-');
   return {s.rbegin(), s.rend()};
}

int_t parse_int(std::string_view s) {
   if (s.empty()) throw std::invalid_argument("empty integer");
   bool neg = false;
   size_t i = 0;
   if (s[0] == '-' || s[0] == '+') {
      neg = s[0] == '-';
      i = 1;
   }
   if (i == s.size()) throw std::invalid_argument("bad integer");
   int_t v = 0;
   for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw std::invalid_argument("bad integer: " + std::string(s));
      v = add(mul(v, 10), s[i] - '0');
   }
   return neg ? -v : v;
}

int_t pow10(int n) {
   int_t r = 1;
   for (int i = 0; i < n; ++i) r = mul(r, 10);
   return r;
}

}  // namespace

rational::rational(int_t n, int_t d) {
   if (d == 0) throw std::domain_error("rational with zero denominator");
   if (d < 0) {
      n = -n;
      d = -d;
   }
   int_t g = gcd(n, d);
   if (g > 1) {
      n /= g;
      d /= g;
   }
   num_ = n;
   den_ = d;
}

rational rational::parse(std::string_view text) {
   while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
   while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
   if (text.empty()) throw std::invalid_argument("empty rational");
   if (auto slash = text.find('/'); slash != std::string_view::npos)
      return {parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))};
   int exp = 0;
   if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      exp = static_cast<int>(parse_int(text.substr(e + 1)));
      text = text.substr(0, e);
   }
   int_t n = 0;
   int scale = 0;
   if (auto dot = text.find('.'); dot != std::string_view::npos) {
      std::string digits(text.substr(0, dot));
      std::string frac(text.substr(dot + 1));
      bool neg = !digits.empty() && digits[0] == '-';
      if (digits.empty() || digits == "-" || digits == "+") digits += "0";
      n = parse_int(digits + frac);
      if (neg && n > 0) n = -n;
      scale = static_cast<int>(frac.size());
   } else {
      n = parse_int(text);
   }
   scale -= exp;
   if (scale >= 0) return {n, pow10(scale)};
   return {mul(n, pow10(-scale)), 1};
}

rational rational::operator-() const { return {-num_, den_}; }

rational operator+(const rational& a, const rational& b) {
   if (a.den_ == b.den_) return {add(a.num_, b.num_), a.den_};
   return {add(mul(a.num_, b.den_), mul(b.num_, a.den_)), mul(a.den_, b.den_)};
}

rational operator-(const rational& a, const rational& b) { return a + (-b); }

rational operator*(const rational& a, const rational& b) {
   int_t g1 = gcd(a.num_, b.den_);
   int_t g2 = gcd(b.num_, a.den_);
   if (g1 == 0) g1 = 1;
   if (g2 == 0) g2 = 1;
   return {mul(a.num_ / g1, b.num_ / g2), mul(a.den_ / g2, b.den_ / g1)};
}

rational operator/(const rational& a, const rational& b) {
   if (b.num_ == 0) throw std::domain_error("rational division by zero");
   return a * rational(b.den_, b.num_);
}

std::strong_ordering operator<=>(const rational& a, const rational& b) {
   if (a.den_ == b.den_) return a.num_ <=> b.num_;
   return mul(a.num_, b.den_) <=> mul(b.num_, a.den_);
}

std::int64_t rational::floor() const {
   int_t q = num_ / den_;
   if (num_ % den_ != 0 && num_ < 0) --q;
   return static_cast<std::int64_t>(q);
}

std::int64_t rational::ceil() const {
   int_t q = num_ / den_;
   if (num_ % den_ != 0 && num_ > 0) ++q;
   return static_cast<std::int64_t>(q);
}

double rational::to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

std::string rational::str() const {
   if (den_ == 1) return to_string(num_);
   return to_string(num_) + "/" + to_string(den_);
}

rational min(const rational& a, const rational& b) { return b < a ? b : a; }
rational max(const rational& a, const rational& b) { return a < b ? b : a; }

}  // namespace gasper

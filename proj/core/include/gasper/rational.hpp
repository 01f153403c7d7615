#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gasper {

struct arithmetic_overflow : std::overflow_error {
   using std::overflow_error::overflow_error;
};

/// Exact fraction over 128-bit integers. Every operation is overflow-checked
/// and throws arithmetic_overflow instead of wrapping.
class rational {
 public:
   using int_t = __int128;

   constexpr rational() = default;
   rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
   rational(int_t n, int_t d);

   /// Accepts "3", "-2/7", "0.16" and "1e-3".
   static rational parse(std::string_view text);

   int_t num() const { return num_; }
   int_t den() const { return den_; }

   rational operator-() const;
   friend rational operator+(const rational& a, const rational& b);
   friend rational operator-(const rational& a, const rational& b);
   friend rational operator*(const rational& a, const rational& b);
   friend rational operator/(const rational& a, const rational& b);
   rational& operator+=(const rational& o) { return *this = *this + o; }
   rational& operator-=(const rational& o) { return *this = *this - o; }
   rational& operator*=(const rational& o) { return *this = *this * o; }

   friend bool operator==(const rational& a, const rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
   friend std::strong_ordering operator<=>(const rational& a, const rational& b);

   std::int64_t floor() const;
   std::int64_t ceil() const;
   double to_double() const;
   std::string str() const;

 private:
   int_t num_ = 0;
   int_t den_ = 1;
};

rational min(const rational& a, const rational& b);
rational max(const rational& a, const rational& b);

}  // namespace gasper

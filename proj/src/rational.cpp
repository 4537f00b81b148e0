#include "fglchern/rational.hpp"

#include "fglchern/error.hpp"

namespace fglchern {

Rational rational(long num, long den) {
  if (den == 0) throw Error("rational: zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      return Rational(mpz_class(text));
    }
    mpz_class num(text.substr(0, slash));
    mpz_class den(text.substr(slash + 1));
    if (den == 0) throw Error("rational: zero denominator", text);
    Rational q(num, den);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw Error("rational: malformed literal", text);
  }
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

std::string to_string(const Rational& q) {
  if (is_integer(q)) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace fglchern

#include "emcredit/rating.hpp"

#include <algorithm>

namespace emcredit {

std::string to_string(BroadRating broad) {
  switch (broad) {
    case BroadRating::A: return "A";
    case BroadRating::BBB: return "BBB";
    case BroadRating::BB: return "BB";
    case BroadRating::B: return "B";
  }
  throw std::logic_error("invalid BroadRating");
}

std::string to_string(const RatingGrade& grade) {
  std::string out = to_string(grade.broad);
  if (grade.modifier == RatingModifier::Plus) out += '+';
  if (grade.modifier == RatingModifier::Minus) out += '-';
  return out;
}

std::optional<RatingGrade> try_parse_rating(const std::string& text) {
  std::string body = text;
  RatingModifier mod = RatingModifier::Flat;
  if (!body.empty() && (body.back() == '+' || body.back() == '-')) {
    mod = body.back() == '+' ? RatingModifier::Plus : RatingModifier::Minus;
    body.pop_back();
  }
  for (BroadRating broad : kBroadRatings) {
    if (body == to_string(broad)) return RatingGrade{broad, mod};
  }
  return std::nullopt;
}

RatingGrade parse_rating(const std::string& text) {
  if (auto grade = try_parse_rating(text)) return *grade;
  throw std::invalid_argument("unrecognised rating grade: '" + text + "'");
}

double interpolate_broad_table(const RatingGrade& grade,
                               const std::array<double, 4>& by_broad) {
  // Anchor notches are 1 (A), 4 (BBB), 7 (BB), 10 (B).
  const double pos = std::clamp(static_cast<double>(grade.notch()), 1.0, 10.0);
  const int lo = std::min(static_cast<int>((pos - 1.0) / 3.0), 2);
  const double frac = (pos - (1.0 + 3.0 * lo)) / 3.0;
  return (1.0 - frac) * by_broad[lo] + frac * by_broad[lo + 1];
}

double RatingSchemes::lambda_of(const RatingGrade& grade) const {
  return interpolate_broad_table(grade, lambda_);
}

double RatingSchemes::lstar_c_of(const RatingGrade& grade) const {
  return interpolate_broad_table(grade, lstar_c_);
}

void RatingSchemes::set_lambda(BroadRating broad, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda override must be > 0");
  lambda_[static_cast<int>(broad)] = lambda;
}

void RatingSchemes::set_lstar_c(BroadRating broad, double lstar_c) {
  if (!(lstar_c >= 1.0)) throw std::invalid_argument("L*_c override must be >= 1");
  lstar_c_[static_cast<int>(broad)] = lstar_c;
}

}  // namespace emcredit

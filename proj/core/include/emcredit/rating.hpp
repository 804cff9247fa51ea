#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace emcredit {

// Broad letter grades carried by the rating-indexed tables.
enum class BroadRating { A = 0, BBB = 1, BB = 2, B = 3 };

inline constexpr std::array<BroadRating, 4> kBroadRatings = {
    BroadRating::A, BroadRating::BBB, BroadRating::BB, BroadRating::B};

enum class RatingModifier { Plus, Flat, Minus };

// A broad grade plus modifier, e.g. BBB+. Ordered best (A+) to worst (B-),
// three notches per broad grade.
struct RatingGrade {
  BroadRating broad = BroadRating::BBB;
  RatingModifier modifier = RatingModifier::Flat;

  // 0 = A+, 1 = A, 2 = A-, 3 = BBB+, ..., 11 = B-.
  int notch() const {
    return static_cast<int>(broad) * 3 + static_cast<int>(modifier);
  }
  bool is_broad() const { return modifier == RatingModifier::Flat; }

  friend bool operator==(const RatingGrade&, const RatingGrade&) = default;
  // "less" = better credit, consistent with notch arithmetic.
  friend bool operator<(const RatingGrade& lhs, const RatingGrade& rhs) {
    return lhs.notch() < rhs.notch();
  }
};

std::string to_string(BroadRating broad);
std::string to_string(const RatingGrade& grade);

// Parses "A", "BBB+", "BB-", ... Throws std::invalid_argument on anything else.
RatingGrade parse_rating(const std::string& text);
std::optional<RatingGrade> try_parse_rating(const std::string& text);

// Notch-linear mixture of adjacent broad-grade values. Broad grades return
// the anchor value exactly; modified grades mix the two neighbours with
// weight 1/3 per notch. Positions past the anchor span (A+, B-) clamp to
// the nearest anchor so rating-indexed tables keep their invariants.
double interpolate_broad_table(const RatingGrade& grade,
                               const std::array<double, 4>& by_broad);

// Rating-indexed model inputs: jump intensity lambda and the country
// barrier depth L*_c. Defaults follow the standard scheme; both tables can
// be overridden per broad grade.
class RatingSchemes {
 public:
  RatingSchemes() = default;

  double lambda_of(const RatingGrade& grade) const;
  double lstar_c_of(const RatingGrade& grade) const;

  void set_lambda(BroadRating broad, double lambda);
  void set_lstar_c(BroadRating broad, double lstar_c);

  static constexpr std::array<double, 4> kDefaultLambda = {0.125, 0.25, 0.5, 1.0};
  static constexpr std::array<double, 4> kDefaultLstarC = {1.45, 1.35, 1.20, 1.00};

 private:
  std::array<double, 4> lambda_ = kDefaultLambda;
  std::array<double, 4> lstar_c_ = kDefaultLstarC;
};

}  // namespace emcredit

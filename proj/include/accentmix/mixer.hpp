#ifndef ACCENTMIX_MIXER_HPP
#define ACCENTMIX_MIXER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "accentmix/manifest.hpp"

namespace accentmix {

// One corpus contribution to a training mixture. When full is set, the whole
// corpus manifest is taken and hours records the nominal amount for
// bookkeeping; otherwise hours is a selection target.
struct MixComponent {
  std::string corpus;
  bool full = false;
  double hours = 0.0;
};

struct MixRecipe {
  std::string name;
  std::vector<MixComponent> components;
  std::optional<double> nominal_cv_proportion;

  double component_hours(const std::string& corpus) const;
  double total_hours() const;
};

// The 13-recipe CV-x% series. For x in {0,...,0.8} AAF is taken whole and
// CV grows as aaf * x/(1-x), capped at the full CV train split; the 90% and
// 95% rows keep full CV and halve/quarter AAF (that is what the published
// hour cells correspond to); 100% is CV only; FullCV adds the whole CV
// corpus (train+dev+test, full_cv_hours) to the AAF train split.
std::vector<MixRecipe> build_cv_series(double cv_train_hours,
                                       double aaf_train_hours,
                                       double full_cv_hours);

// Constant-size series: x*total CV plus (1-x)*total AAFaug for x = 0, step,
// ..., 1. step must divide 1 into whole increments.
std::vector<MixRecipe> build_fixed_hours_series(double total_hours,
                                                double step = 0.1);

// Appends another corpus to a recipe ("CV-90" + CFPB -> "CV-90+CFPB").
MixRecipe union_recipe(const MixRecipe& base, const MixComponent& extra);

// Materializes a recipe from corpus manifests. Hour targets are met by
// taking whole speakers greedily (coarse descending duration, seeded
// tie-break) and topping up with individual utterances; the realized total
// lands within 2 minutes of the target or InsufficientData is thrown.
// Selected records keep their original manifest order.
Manifest realize_recipe(const MixRecipe& recipe,
                        const std::map<std::string, Manifest>& corpora,
                        std::uint64_t seed);

// The 5-hour early-stopping validation set: 2.5 h from each dev manifest,
// each half within 2 minutes of the target.
Manifest build_validation_set(const Manifest& cv_dev, const Manifest& aaf_dev);

// Recipe list <-> JSON file.
std::string recipes_to_json(const std::vector<MixRecipe>& recipes);
std::vector<MixRecipe> parse_recipes(const std::string& text);
void save_recipes(const std::vector<MixRecipe>& recipes,
                  const std::string& path);
std::vector<MixRecipe> load_recipes(const std::string& path);

}  // namespace accentmix

#endif  // ACCENTMIX_MIXER_HPP

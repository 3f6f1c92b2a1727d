#pragma once

#include <optional>
#include <string>

#include "fml/bounds.hpp"
#include "fml/solver.hpp"

namespace fml {

enum class DatasetFormat { json, csv };

// A measure loaded from disk, with an optional concentration ball.
struct Dataset {
  DiscreteMeasure measure;
  std::optional<ConcentrationSpec> concentration;
};

// JSON schema:
//   {"schema_version":1, "space":{"curvature":<real>,"dim":<int>},
//    "points":[[...],...], "weights":[...]?,
//    "concentration":{"center":[...],"rho":<real>,"alpha":<real>}?}
// Weights default to uniform; they must be nonnegative and sum to 1 within
// 1e-9 (then renormalized exactly). Points within 1e-6 of the manifold are
// projected onto it; anything farther is rejected.
Dataset load_dataset_json(const std::string& path);

// CSV rows are points, one per line; a trailing extra column is read as the
// weight. The space is not encoded in the file and must be supplied.
Dataset load_dataset_csv(const std::string& path, const ModelSpace& space);

Dataset load_dataset(const std::string& path, DatasetFormat format,
                     const std::optional<ModelSpace>& space = std::nullopt);

void save_dataset_json(const Dataset& ds, const std::string& path);

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace fml

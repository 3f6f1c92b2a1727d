#include "fml/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fml {

namespace {

using nlohmann::json;

constexpr double kProjectionTol = 1e-6;
constexpr double kWeightSumTol = 1e-9;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("dataset parse failure in " + path + ": " + e.what());
  }
  return j;
}

std::vector<double> normalized_weights(std::vector<double> w, std::size_t n_points) {
  if (w.size() != n_points)
    throw InputError("dataset: weights count does not match points count");
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InputError("dataset: weights must be nonnegative and finite");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    std::ostringstream os;
    os << "dataset: weights sum to " << sum << ", expected 1 within " << kWeightSumTol;
    throw InputError(os.str());
  }
  for (double& v : w) v /= sum;
  return w;
}

Dataset assemble(const ModelSpace& space, std::vector<Eigen::VectorXd> raw_points,
                 std::optional<std::vector<double>> weights,
                 std::optional<ConcentrationSpec> conc) {
  std::vector<Point> pts;
  pts.reserve(raw_points.size());
  for (auto& c : raw_points) pts.push_back(project_to_manifold(space, std::move(c), kProjectionTol));
  if (pts.empty()) throw InputError("dataset: no points");

  DiscreteMeasure mu =
      weights ? DiscreteMeasure{space, std::move(pts),
                                normalized_weights(std::move(*weights), raw_points.size())}
              : DiscreteMeasure::with_uniform_weights(space, std::move(pts));
  mu.validate();
  if (conc) conc->validate(space);
  return Dataset{std::move(mu), std::move(conc)};
}

}  // namespace

Dataset load_dataset_json(const std::string& path) {
  const json j = read_json_file(path);
  try {
    if (j.value("schema_version", 1) != 1)
      throw InputError("dataset: unsupported schema_version");
    const json& sp = j.at("space");
    const ModelSpace space(sp.at("curvature").get<double>(), sp.at("dim").get<int>());

    std::vector<Eigen::VectorXd> pts;
    for (const json& row : j.at("points")) {
      Eigen::VectorXd c(row.size());
      for (std::size_t i = 0; i < row.size(); ++i) c(static_cast<Eigen::Index>(i)) = row[i].get<double>();
      pts.push_back(std::move(c));
    }

    std::optional<std::vector<double>> weights;
    if (j.contains("weights")) weights = j.at("weights").get<std::vector<double>>();

    std::optional<ConcentrationSpec> conc;
    if (j.contains("concentration")) {
      const json& cj = j.at("concentration");
      const auto center = cj.at("center").get<std::vector<double>>();
      Eigen::VectorXd c(static_cast<Eigen::Index>(center.size()));
      for (std::size_t i = 0; i < center.size(); ++i) c(static_cast<Eigen::Index>(i)) = center[i];
      conc = ConcentrationSpec{project_to_manifold(space, std::move(c), kProjectionTol),
                               cj.at("rho").get<double>(), cj.at("alpha").get<double>()};
    }
    return assemble(space, std::move(pts), std::move(weights), std::move(conc));
  } catch (const json::exception& e) {
    throw InputError("dataset: malformed JSON in " + path + ": " + e.what());
  }
}

Dataset load_dataset_csv(const std::string& path, const ModelSpace& space) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset file: " + path);

  std::vector<Eigen::VectorXd> pts;
  std::vector<double> weights;
  bool any_weight = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        std::ostringstream os;
        os << "dataset: unparsable number '" << cell << "' at " << path << ":" << lineno;
        throw InputError(os.str());
      }
    }
    const std::size_t adim = static_cast<std::size_t>(space.ambient_dim());
    if (vals.size() == adim + 1) {
      weights.push_back(vals.back());
      vals.pop_back();
      any_weight = true;
    } else if (vals.size() != adim) {
      std::ostringstream os;
      os << "dataset: row with " << vals.size() << " columns at " << path << ":" << lineno
         << ", expected " << adim << " or " << adim + 1;
      throw InputError(os.str());
    } else {
      weights.push_back(-1.0);  // marks a weightless row
    }
    Eigen::VectorXd c(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) c(static_cast<Eigen::Index>(i)) = vals[i];
    pts.push_back(std::move(c));
  }
  if (any_weight) {
    for (double w : weights)
      if (w < 0.0) throw InputError("dataset: mixed weighted and unweighted rows");
    return assemble(space, std::move(pts), std::move(weights), std::nullopt);
  }
  return assemble(space, std::move(pts), std::nullopt, std::nullopt);
}

Dataset load_dataset(const std::string& path, DatasetFormat format,
                     const std::optional<ModelSpace>& space) {
  if (format == DatasetFormat::json) return load_dataset_json(path);
  if (!space) throw InputError("CSV datasets need --curvature/--dim for the space");
  return load_dataset_csv(path, *space);
}

void save_dataset_json(const Dataset& ds, const std::string& path) {
  json j;
  j["schema_version"] = 1;
  j["space"] = {{"curvature", ds.measure.space.curvature()}, {"dim", ds.measure.space.dim()}};
  json pts = json::array();
  for (const Point& p : ds.measure.points) {
    json row = json::array();
    for (Eigen::Index i = 0; i < p.coords.size(); ++i) row.push_back(p.coords(i));
    pts.push_back(std::move(row));
  }
  j["points"] = std::move(pts);
  j["weights"] = ds.measure.weights;
  if (ds.concentration) {
    json c = json::array();
    for (Eigen::Index i = 0; i < ds.concentration->center.coords.size(); ++i)
      c.push_back(ds.concentration->center.coords(i));
    j["concentration"] = {{"center", std::move(c)},
                          {"rho", ds.concentration->rho},
                          {"alpha", ds.concentration->alpha}};
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write dataset file: " + path);
  out << j.dump(2) << "\n";
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace fml

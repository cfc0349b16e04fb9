#pragma once

// Seeded synthetic datasets with ground-truth labels. Gaussian components
// are truncated at a Mahalanobis radius so every component is bounded; this
// keeps ground-truth clusters separable in an epsilon-ball graph.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quac/error.hpp"
#include "quac/graph.hpp"
#include "quac/metrics.hpp"
#include "quac/random.hpp"

namespace quac {

struct LabeledDataset {
  PointCloud cloud;
  Labels truth;
  nlohmann::json generator_params = nlohmann::json::object();

  std::size_t size() const { return cloud.size(); }
  int cluster_count() const {
    int k = 0;
    for (int l : truth) k = std::max(k, l + 1);
    return k;
  }
};

using Point2 = std::array<double, 2>;

struct FiveClusterParams {
  double radius = 10.0;  // pentagon circumradius; neighbor spacing 1.18 * radius
  double sigma = 1.0;
  double truncation = 3.5;  // in units of sigma
  std::vector<Point2> centers;  // empty: regular pentagon
};

struct EllipticalParams {
  double sigma_y = 1.0;  // elliptical component; sigma_x = sqrt(2) sigma_y
  double ellipse_truncation = 2.5;
  Point2 ellipse_center{0.0, 0.0};
  double circle_sigma = 0.5;
  double circle_truncation = 2.5;
  Point2 circle_center{0.0, 5.5};
  double circle_ratio = 0.04;  // circle count / ellipse count
};

struct ThreeCigarsParams {
  double sigma_long = 2.5;
  double sigma_short = 0.5;
  double spacing = 4.5;  // center distance along the short axis
  double truncation = 2.5;
};

struct SunMoonParams {
  double moon_radius = 5.0;
  double moon_noise = 0.3;  // radial, truncated at 3 sigma
  Point2 moon_center{0.0, 0.0};
  double sun_sigma = 0.6;
  double sun_truncation = 2.5;
  Point2 sun_center{0.0, 1.0};
};

namespace detail {

/// Standard normal vector of dimension 2 with norm below `radius`.
inline Point2 truncated_normal2(Rng& rng, double radius) {
  while (true) {
    const double a = standard_normal(rng);
    const double b = standard_normal(rng);
    if (radius <= 0.0 || a * a + b * b < radius * radius) return {a, b};
  }
}

inline double truncated_normal1(Rng& rng, double radius) {
  while (true) {
    const double a = standard_normal(rng);
    if (radius <= 0.0 || std::abs(a) < radius) return a;
  }
}

struct Builder {
  std::vector<Point2> pts;
  Labels labels;
  void add(Point2 p, int label) {
    pts.push_back(p);
    labels.push_back(label);
  }
  LabeledDataset finish(nlohmann::json params) {
    Matrix m(static_cast<Eigen::Index>(pts.size()), 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      m(static_cast<Eigen::Index>(i), 0) = pts[i][0];
      m(static_cast<Eigen::Index>(i), 1) = pts[i][1];
    }
    return {PointCloud(std::move(m)), std::move(labels), std::move(params)};
  }
};

inline nlohmann::json point_json(const Point2& p) { return {p[0], p[1]}; }
inline Point2 point_from_json(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace detail

inline std::vector<Point2> pentagon_centers(double radius) {
  constexpr double kPi = 3.14159265358979323846;
  std::vector<Point2> c;
  for (int i = 0; i < 5; ++i)
    c.push_back({radius * std::sin(2.0 * kPi * i / 5.0), radius * std::cos(2.0 * kPi * i / 5.0)});
  return c;
}

inline LabeledDataset gen_five_cluster(std::size_t n_per_cluster, std::uint64_t seed,
                                       const FiveClusterParams& p = {}) {
  if (n_per_cluster < 1) throw ParameterError("gen_five_cluster: n_per_cluster must be >= 1");
  if (!(p.sigma > 0.0)) throw ParameterError("gen_five_cluster: sigma must be positive");
  const std::vector<Point2> centers = p.centers.empty() ? pentagon_centers(p.radius) : p.centers;
  if (centers.size() != 5) throw ParameterError("gen_five_cluster: need exactly five centers");
  Rng rng = derive_stream(seed, 0);
  detail::Builder b;
  for (int c = 0; c < 5; ++c)
    for (std::size_t i = 0; i < n_per_cluster; ++i) {
      const Point2 z = detail::truncated_normal2(rng, p.truncation);
      b.add({centers[c][0] + p.sigma * z[0], centers[c][1] + p.sigma * z[1]}, c);
    }
  nlohmann::json j = {{"generator", "five_cluster"}, {"n_per_cluster", n_per_cluster},
                      {"seed", seed},                {"radius", p.radius},
                      {"sigma", p.sigma},            {"truncation", p.truncation}};
  j["centers"] = nlohmann::json::array();
  for (const auto& c : centers) j["centers"].push_back(detail::point_json(c));
  return b.finish(std::move(j));
}

/// Label 0: anisotropic component with Var_x = 2 Var_y and `n_per_cluster`
/// points; label 1: isotropic component with circle_ratio times as many.
inline LabeledDataset gen_elliptical(std::size_t n_per_cluster, std::uint64_t seed,
                                     const EllipticalParams& p = {}) {
  if (n_per_cluster < 1) throw ParameterError("gen_elliptical: n_per_cluster must be >= 1");
  if (!(p.sigma_y > 0.0 && p.circle_sigma > 0.0 && p.circle_ratio > 0.0))
    throw ParameterError("gen_elliptical: scales and ratio must be positive");
  const auto n_circle = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(p.circle_ratio * static_cast<double>(n_per_cluster))));
  const double sigma_x = std::sqrt(2.0) * p.sigma_y;
  Rng rng = derive_stream(seed, 0);
  detail::Builder b;
  for (std::size_t i = 0; i < n_per_cluster; ++i) {
    const Point2 z = detail::truncated_normal2(rng, p.ellipse_truncation);
    b.add({p.ellipse_center[0] + sigma_x * z[0], p.ellipse_center[1] + p.sigma_y * z[1]}, 0);
  }
  for (std::size_t i = 0; i < n_circle; ++i) {
    const Point2 z = detail::truncated_normal2(rng, p.circle_truncation);
    b.add({p.circle_center[0] + p.circle_sigma * z[0], p.circle_center[1] + p.circle_sigma * z[1]}, 1);
  }
  return b.finish({{"generator", "elliptical"},
                   {"n_per_cluster", n_per_cluster},
                   {"seed", seed},
                   {"sigma_y", p.sigma_y},
                   {"ellipse_truncation", p.ellipse_truncation},
                   {"ellipse_center", detail::point_json(p.ellipse_center)},
                   {"circle_sigma", p.circle_sigma},
                   {"circle_truncation", p.circle_truncation},
                   {"circle_center", detail::point_json(p.circle_center)},
                   {"circle_ratio", p.circle_ratio},
                   {"n_circle", n_circle}});
}

/// Three parallel cigars along x, stacked along y.
inline LabeledDataset gen_three_cigars(std::size_t n_per_cluster, std::uint64_t seed,
                                       const ThreeCigarsParams& p = {}) {
  if (n_per_cluster < 1) throw ParameterError("gen_three_cigars: n_per_cluster must be >= 1");
  if (!(p.sigma_long > 0.0 && p.sigma_short > 0.0))
    throw ParameterError("gen_three_cigars: scales must be positive");
  Rng rng = derive_stream(seed, 0);
  detail::Builder b;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < n_per_cluster; ++i) {
      const Point2 z = detail::truncated_normal2(rng, p.truncation);
      b.add({p.sigma_long * z[0], (c - 1) * p.spacing + p.sigma_short * z[1]}, c);
    }
  return b.finish({{"generator", "three_cigars"},
                   {"n_per_cluster", n_per_cluster},
                   {"seed", seed},
                   {"sigma_long", p.sigma_long},
                   {"sigma_short", p.sigma_short},
                   {"spacing", p.spacing},
                   {"truncation", p.truncation}});
}

/// Label 0: upper half-annulus ("moon"); label 1: isotropic "sun" inside it.
inline LabeledDataset gen_sun_moon(std::size_t n_sun, std::size_t n_moon, std::uint64_t seed,
                                   const SunMoonParams& p = {}) {
  if (n_sun < 1 || n_moon < 1) throw ParameterError("gen_sun_moon: counts must be >= 1");
  if (!(p.moon_radius > 0.0 && p.moon_noise >= 0.0 && p.sun_sigma > 0.0))
    throw ParameterError("gen_sun_moon: invalid geometry");
  constexpr double kPi = 3.14159265358979323846;
  Rng rng = derive_stream(seed, 0);
  detail::Builder b;
  for (std::size_t i = 0; i < n_moon; ++i) {
    const double angle = kPi * uniform01(rng);
    const double r = p.moon_radius + p.moon_noise * detail::truncated_normal1(rng, 3.0);
    b.add({p.moon_center[0] + r * std::cos(angle), p.moon_center[1] + r * std::sin(angle)}, 0);
  }
  for (std::size_t i = 0; i < n_sun; ++i) {
    const Point2 z = detail::truncated_normal2(rng, p.sun_truncation);
    b.add({p.sun_center[0] + p.sun_sigma * z[0], p.sun_center[1] + p.sun_sigma * z[1]}, 1);
  }
  return b.finish({{"generator", "sun_moon"},
                   {"n_sun", n_sun},
                   {"n_moon", n_moon},
                   {"seed", seed},
                   {"moon_radius", p.moon_radius},
                   {"moon_noise", p.moon_noise},
                   {"moon_center", detail::point_json(p.moon_center)},
                   {"sun_sigma", p.sun_sigma},
                   {"sun_truncation", p.sun_truncation},
                   {"sun_center", detail::point_json(p.sun_center)}});
}

/// Rebuilds a dataset from its recorded generator_params. Keys absent from
/// `params` take their defaults.
inline LabeledDataset regenerate(const nlohmann::json& params) {
  if (!params.is_object() || !params.contains("generator"))
    throw InputError("regenerate: params lack a generator name");
  const std::string name = params.at("generator").get<std::string>();
  const auto seed = params.value("seed", std::uint64_t{0});
  auto pt = [&](const char* key, Point2 fallback) {
    return params.contains(key) ? detail::point_from_json(params.at(key)) : fallback;
  };
  if (name == "five_cluster") {
    FiveClusterParams p;
    p.radius = params.value("radius", p.radius);
    p.sigma = params.value("sigma", p.sigma);
    p.truncation = params.value("truncation", p.truncation);
    if (params.contains("centers"))
      for (const auto& c : params.at("centers")) p.centers.push_back(detail::point_from_json(c));
    return gen_five_cluster(params.value("n_per_cluster", std::size_t{200}), seed, p);
  }
  if (name == "elliptical") {
    EllipticalParams p;
    p.sigma_y = params.value("sigma_y", p.sigma_y);
    p.ellipse_truncation = params.value("ellipse_truncation", p.ellipse_truncation);
    p.ellipse_center = pt("ellipse_center", p.ellipse_center);
    p.circle_sigma = params.value("circle_sigma", p.circle_sigma);
    p.circle_truncation = params.value("circle_truncation", p.circle_truncation);
    p.circle_center = pt("circle_center", p.circle_center);
    p.circle_ratio = params.value("circle_ratio", p.circle_ratio);
    return gen_elliptical(params.value("n_per_cluster", std::size_t{1000}), seed, p);
  }
  if (name == "three_cigars") {
    ThreeCigarsParams p;
    p.sigma_long = params.value("sigma_long", p.sigma_long);
    p.sigma_short = params.value("sigma_short", p.sigma_short);
    p.spacing = params.value("spacing", p.spacing);
    p.truncation = params.value("truncation", p.truncation);
    return gen_three_cigars(params.value("n_per_cluster", std::size_t{500}), seed, p);
  }
  if (name == "sun_moon") {
    SunMoonParams p;
    p.moon_radius = params.value("moon_radius", p.moon_radius);
    p.moon_noise = params.value("moon_noise", p.moon_noise);
    p.moon_center = pt("moon_center", p.moon_center);
    p.sun_sigma = params.value("sun_sigma", p.sun_sigma);
    p.sun_truncation = params.value("sun_truncation", p.sun_truncation);
    p.sun_center = pt("sun_center", p.sun_center);
    return gen_sun_moon(params.value("n_sun", std::size_t{400}), params.value("n_moon", std::size_t{1200}),
                        seed, p);
  }
  throw InputError("regenerate: unknown generator '" + name + "'");
}

/// Uniform sample of round(fraction * n) points without replacement; original
/// order, ids and labels preserved.
inline LabeledDataset subsample(const LabeledDataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ParameterError("subsample: fraction must lie in (0, 1]");
  const auto n = ds.size();
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (count == 0) throw InputError("subsample: sample would be empty");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng = derive_stream(seed, 1);
  for (std::size_t j = 0; j < count; ++j) std::swap(idx[j], idx[j + uniform_index(rng, n - j)]);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  LabeledDataset out;
  out.cloud = ds.cloud.select(idx);
  for (std::size_t i : idx) out.truth.push_back(ds.truth[i]);
  out.generator_params = ds.generator_params;
  out.generator_params["subsample"] = {{"fraction", fraction}, {"seed", seed}};
  return out;
}

/// Truth labels restricted to the ids of `cloud`, in cloud order.
inline Labels truth_for(const LabeledDataset& ds, const PointCloud& cloud) {
  Labels out;
  out.reserve(cloud.size());
  for (VertexId id : cloud.ids()) out.push_back(ds.truth[ds.cloud.index_of(id)]);
  return out;
}

// ---------------------------------------------------------------------------
// I/O
// ---------------------------------------------------------------------------

/// Columns: id, x1..xd, label.
inline void write_dataset_csv(std::ostream& os, const LabeledDataset& ds) {
  os.precision(17);
  os << "id";
  for (Eigen::Index d = 0; d < ds.cloud.dim(); ++d) os << ",x" << (d + 1);
  os << ",label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    os << ds.cloud.id(i);
    for (Eigen::Index d = 0; d < ds.cloud.dim(); ++d) os << ',' << ds.cloud.point(i)(d);
    os << ',' << ds.truth[i] << '\n';
  }
}

/// Accepts the layout above, or x1..xd,label without an id column.
inline LabeledDataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("dataset csv: empty input");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header.back() != "label") throw InputError("dataset csv: last column must be 'label'");
  const bool has_id = header.front() == "id";
  const std::size_t dim = header.size() - 1 - (has_id ? 1 : 0);
  if (dim < 1) throw InputError("dataset csv: no coordinate columns");
  std::vector<std::vector<double>> rows;
  std::vector<VertexId> ids;
  Labels labels;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size())
      throw InputError("dataset csv: wrong column count on line " + std::to_string(line_no));
    try {
      std::size_t c = 0;
      ids.push_back(has_id ? std::stoll(cells[c++]) : static_cast<VertexId>(rows.size()));
      std::vector<double> row;
      for (std::size_t d = 0; d < dim; ++d) row.push_back(std::stod(cells[c++]));
      rows.push_back(std::move(row));
      labels.push_back(std::stoi(cells[c]));
    } catch (const std::logic_error&) {
      throw InputError("dataset csv: unparsable value on line " + std::to_string(line_no));
    }
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t d = 0; d < dim; ++d) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = rows[r][d];
  LabeledDataset ds;
  ds.cloud = PointCloud(std::move(m), std::move(ids));
  ds.truth = std::move(labels);
  return ds;
}

inline nlohmann::json to_json(const LabeledDataset& ds) {
  nlohmann::json j;
  j["generator_params"] = ds.generator_params;
  j["ids"] = ds.cloud.ids();
  j["labels"] = ds.truth;
  j["points"] = nlohmann::json::array();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::vector<double> row;
    for (Eigen::Index d = 0; d < ds.cloud.dim(); ++d) row.push_back(ds.cloud.point(i)(d));
    j["points"].push_back(row);
  }
  return j;
}

inline LabeledDataset dataset_from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("points")) return regenerate(j.at("generator_params"));
    const auto& pts = j.at("points");
    const std::size_t n = pts.size();
    const std::size_t dim = n ? pts.at(0).size() : 0;
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < n; ++r) {
      if (pts.at(r).size() != dim) throw InputError("dataset json: ragged points");
      for (std::size_t d = 0; d < dim; ++d)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = pts.at(r).at(d).get<double>();
    }
    LabeledDataset ds;
    std::vector<VertexId> ids = j.contains("ids") ? j.at("ids").get<std::vector<VertexId>>() : std::vector<VertexId>{};
    if (ids.empty()) {
      ids.resize(n);
      std::iota(ids.begin(), ids.end(), VertexId{0});
    }
    ds.cloud = PointCloud(std::move(m), std::move(ids));
    ds.truth = j.at("labels").get<Labels>();
    if (ds.truth.size() != n) throw InputError("dataset json: label count differs from point count");
    ds.generator_params = j.value("generator_params", nlohmann::json::object());
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("dataset json: ") + e.what());
  }
}

}  // namespace quac

#include "sig2d/pca.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace sig2d {

using nlohmann::json;

PcaModel pca_fit(std::span<const ImageField> images, std::size_t n_components) {
  if (images.size() < 2) throw ParameterError("pca_fit needs at least 2 images");
  const ImageField& first = images.front();
  const std::size_t n = images.size();
  const std::size_t p = first.size();
  if (n_components < 1 || n_components > std::min(n - 1, p)) {
    throw ParameterError("n_components=" + std::to_string(n_components) +
                         " outside [1, " + std::to_string(std::min(n - 1, p)) + "]");
  }
  for (const ImageField& x : images) {
    if (x.height() != first.height() || x.width() != first.width() ||
        x.channels() != first.channels()) {
      throw DataError("pca_fit: images must share dimensions");
    }
  }

  Eigen::MatrixXd data(n, p);
  for (std::size_t r = 0; r < n; ++r) {
    const auto v = images[r].values();
    for (std::size_t c = 0; c < p; ++c) data(r, c) = v[c];
  }
  // Centering leaves rounding residue of order eps * |x|, so the rank cut
  // scales with the raw data as well as with the leading singular value.
  const double raw_norm = data.norm();
  const Eigen::RowVectorXd mean = data.colwise().mean();
  data.rowwise() -= mean;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();

  PcaModel model;
  model.dims = {first.height(), first.width(), first.channels()};
  model.mean.assign(mean.data(), mean.data() + p);

  const double total = s.squaredNorm();
  const double tol = s.size() > 0 ? static_cast<double>(std::max(n, p)) *
                                        std::numeric_limits<double>::epsilon() *
                                        std::max(s(0), raw_norm)
                                  : 0.0;
  for (std::size_t j = 0; j < n_components; ++j) {
    if (j >= static_cast<std::size_t>(s.size()) || s(j) <= tol || s(j) == 0.0) {
      model.rank_deficient = true;
      break;
    }
    std::vector<double> comp(v.col(j).data(), v.col(j).data() + p);
    std::size_t arg = 0;
    for (std::size_t c = 1; c < p; ++c) {
      if (std::abs(comp[c]) > std::abs(comp[arg])) arg = c;
    }
    if (comp[arg] < 0) {
      for (double& e : comp) e = -e;
    }
    model.components.push_back(std::move(comp));
    model.explained_variance_ratio.push_back(s(j) * s(j) / total);
  }
  return model;
}

std::vector<double> pca_transform(const PcaModel& model, const ImageField& x) {
  if (x.height() != model.dims[0] || x.width() != model.dims[1] ||
      x.channels() != model.dims[2]) {
    throw DataError("pca_transform: image is " + std::to_string(x.height()) + "x" +
                    std::to_string(x.width()) + "x" + std::to_string(x.channels()) +
                    ", model expects " + std::to_string(model.dims[0]) + "x" +
                    std::to_string(model.dims[1]) + "x" + std::to_string(model.dims[2]));
  }
  const auto values = x.values();
  std::vector<double> coords(model.n_components(), 0.0);
  for (std::size_t j = 0; j < coords.size(); ++j) {
    const auto& comp = model.components[j];
    double acc = 0.0;
    for (std::size_t c = 0; c < values.size(); ++c) acc += (values[c] - model.mean[c]) * comp[c];
    coords[j] = acc;
  }
  return coords;
}

ImageField pca_reconstruct(const PcaModel& model, std::span<const double> coords) {
  if (coords.size() > model.n_components()) {
    throw DataError("pca_reconstruct: more coordinates than components");
  }
  std::vector<double> values = model.mean;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    for (std::size_t c = 0; c < values.size(); ++c) values[c] += coords[j] * model.components[j][c];
  }
  return ImageField(model.dims[0], model.dims[1], model.dims[2], std::move(values));
}

std::string pca_to_json(const PcaModel& model) {
  json j;
  j["dims"] = model.dims;
  j["mean"] = model.mean;
  j["components"] = model.components;
  j["explained_variance_ratio"] = model.explained_variance_ratio;
  j["rank_deficient"] = model.rank_deficient;
  return j.dump();
}

PcaModel pca_from_json(const std::string& text) {
  PcaModel model;
  try {
    const json j = json::parse(text);
    model.dims = j.at("dims").get<std::array<std::size_t, 3>>();
    model.mean = j.at("mean").get<std::vector<double>>();
    model.components = j.at("components").get<std::vector<std::vector<double>>>();
    model.explained_variance_ratio = j.at("explained_variance_ratio").get<std::vector<double>>();
    model.rank_deficient = j.value("rank_deficient", false);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed PCA model: ") + e.what());
  }
  if (model.mean.size() != model.pixel_count()) throw DataError("PCA model: mean length mismatch");
  for (const auto& c : model.components) {
    if (c.size() != model.pixel_count()) throw DataError("PCA model: component length mismatch");
  }
  if (model.explained_variance_ratio.size() != model.components.size()) {
    throw DataError("PCA model: ratio count mismatch");
  }
  return model;
}

void save_pca(const PcaModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << pca_to_json(model) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

PcaModel load_pca(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return pca_from_json(buf.str());
}

}  // namespace sig2d

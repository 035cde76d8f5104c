#include "mindsculpt/error.hpp"
#include "mindsculpt/io.hpp"

#include <json.hpp>

#include <fstream>

namespace mindsculpt {

using nlohmann::json;

void write_feature_matrix(const FeatureMatrix& fm, const std::filesystem::path& path) {
  json header;
  header["format"] = "mindsculpt-features";
  header["version"] = 1;
  header["n_rows"] = fm.n_rows();
  header["n_cols"] = fm.n_features();
  header["n_bands"] = fm.n_bands;
  header["labels"] = fm.labels;
  header["trial_ids"] = fm.trial_ids;
  json cols = json::array();
  for (const auto& c : fm.columns) cols.push_back({c.channel, c.band});
  header["columns"] = std::move(cols);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << header.dump() << '\n';
  std::vector<float> row(fm.n_features());
  for (std::size_t r = 0; r < fm.n_rows(); ++r) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = static_cast<float>(fm.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

FeatureMatrix read_feature_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  FeatureMatrix fm;
  std::size_t rows = 0;
  std::size_t cols = 0;
  try {
    const json header = json::parse(line);
    if (header.at("format").get<std::string>() != "mindsculpt-features") throw InvalidData("not a feature file");
    rows = header.at("n_rows").get<std::size_t>();
    cols = header.at("n_cols").get<std::size_t>();
    fm.n_bands = header.at("n_bands").get<std::size_t>();
    fm.labels = header.at("labels").get<std::vector<int>>();
    fm.trial_ids = header.at("trial_ids").get<std::vector<int>>();
    for (const auto& c : header.at("columns")) fm.columns.push_back({c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>()});
  } catch (const json::exception& e) {
    throw InvalidData("malformed feature header in " + path.string() + ": " + e.what());
  }
  if (fm.labels.size() != rows || fm.trial_ids.size() != rows || fm.columns.size() != cols) {
    throw InvalidData("feature header sizes are inconsistent");
  }
  fm.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::vector<float> row(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(cols * sizeof(float)));
    if (!in) throw InvalidData("feature file " + path.string() + " is truncated");
    for (std::size_t c = 0; c < cols; ++c) fm.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return fm;
}

}  // namespace mindsculpt

#include "mindsculpt/error.hpp"
#include "mindsculpt/synth.hpp"

#include <cmath>
#include <sstream>

namespace mindsculpt {

namespace detail {
extern const char* const kLayoutCsv;
}

namespace {

std::vector<ChannelSite> parse_layout() {
  std::istringstream in(detail::kLayoutCsv);
  std::string line;
  std::getline(in, line);  // header
  std::vector<ChannelSite> sites;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    ChannelSite site;
    std::string field;
    std::getline(row, site.label, ',');
    std::getline(row, field, ',');
    site.position.x = std::stod(field);
    std::getline(row, field, ',');
    site.position.y = std::stod(field);
    std::getline(row, field, ',');
    site.position.z = std::stod(field);
    sites.push_back(std::move(site));
  }
  return sites;
}

void check_count(std::size_t n_channels) {
  if (n_channels == 0 || n_channels > default_layout().size()) {
    throw InvalidArgument("the synthetic montage has " + std::to_string(default_layout().size()) +
                          " sites; requested " + std::to_string(n_channels));
  }
}

bool in_region(ScalpRegion region, const Point3& p) {
  switch (region) {
    case ScalpRegion::Frontal: return p.y > 0.45;
    case ScalpRegion::Posterior: return p.y < -0.55;
    case ScalpRegion::Parietal: return p.y >= -0.55 && p.y < -0.15 && p.z > 0.3;
    case ScalpRegion::Central: return std::abs(p.y) < 0.25 && p.z > 0.5;
  }
  return false;
}

}  // namespace

const std::vector<ChannelSite>& default_layout() {
  static const std::vector<ChannelSite> sites = parse_layout();
  return sites;
}

std::vector<std::string> default_labels(std::size_t n_channels) {
  check_count(n_channels);
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < n_channels; ++c) labels.push_back(default_layout()[c].label);
  return labels;
}

std::vector<Point3> default_positions(std::size_t n_channels) {
  check_count(n_channels);
  std::vector<Point3> positions;
  for (std::size_t c = 0; c < n_channels; ++c) positions.push_back(default_layout()[c].position);
  return positions;
}

std::vector<std::size_t> region_channels(ScalpRegion region, std::size_t n_channels) {
  check_count(n_channels);
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < n_channels; ++c) {
    if (in_region(region, default_layout()[c].position)) out.push_back(c);
  }
  return out;
}

}  // namespace mindsculpt

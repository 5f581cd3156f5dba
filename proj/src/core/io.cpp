#include "core/io.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace gwfit {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream f(path, mode);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream f(path, mode);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  return f;
}

template <class T>
void put(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T get(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!f) throw std::runtime_error("binary read failed (truncated file?)");
  return v;
}

}  // namespace

void write_sites_csv(const SiteSet& sites, const std::string& path) {
  auto f = open_out(path);
  f.precision(17);
  f << "index";
  for (int k = 1; k <= sites.dim; ++k) f << ",x" << k;
  f << "\n";
  for (int i = 0; i < sites.n; ++i) {
    f << i;
    for (int k = 0; k < sites.dim; ++k) f << "," << sites.site(i)[k];
    f << "\n";
  }
}

SiteSet read_sites_csv(const std::string& path, double tau, uint64_t seed) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty sites csv: " + path);
  int dim = -1;  // columns minus the index column
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) ++dim;
  }
  if (dim < 1) throw std::runtime_error("sites csv needs index,x1,... columns: " + path);
  SiteSet s;
  s.dim = dim;
  s.tau = tau;
  s.seed = seed;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');  // index column
    for (int k = 0; k < dim; ++k) {
      if (!std::getline(ss, tok, ','))
        throw std::runtime_error("sites csv row with missing coordinates: " + line);
      s.coords.push_back(std::stod(tok));
    }
    ++s.n;
  }
  return s;
}

void write_sites_binary(const SiteSet& sites, const std::string& path) {
  auto f = open_out(path, std::ios::binary);
  put<int64_t>(f, sites.dim);
  put<int64_t>(f, sites.n);
  put<double>(f, sites.tau);
  put<uint64_t>(f, sites.seed);
  f.write(reinterpret_cast<const char*>(sites.coords.data()),
          static_cast<std::streamsize>(sites.coords.size() * sizeof(double)));
}

SiteSet read_sites_binary(const std::string& path) {
  auto f = open_in(path, std::ios::binary);
  SiteSet s;
  s.dim = static_cast<int>(get<int64_t>(f));
  s.n = static_cast<int>(get<int64_t>(f));
  s.tau = get<double>(f);
  s.seed = get<uint64_t>(f);
  if (s.dim < 1 || s.n < 0) throw std::runtime_error("corrupt site binary header: " + path);
  s.coords.resize(static_cast<size_t>(s.n) * s.dim);
  f.read(reinterpret_cast<char*>(s.coords.data()),
         static_cast<std::streamsize>(s.coords.size() * sizeof(double)));
  if (!f) throw std::runtime_error("binary read failed (truncated file?): " + path);
  return s;
}

void write_observations_csv(const Eigen::MatrixXd& obs, const std::string& path) {
  auto f = open_out(path);
  f.precision(17);
  f << "replicate,site_index,value\n";
  for (Eigen::Index r = 0; r < obs.rows(); ++r)
    for (Eigen::Index i = 0; i < obs.cols(); ++i)
      f << r << "," << i << "," << obs(r, i) << "\n";
}

Eigen::MatrixXd read_observations_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  std::getline(f, line);  // header
  std::map<std::pair<long, long>, double> cells;
  long max_r = -1, max_i = -1;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ','))
      throw std::runtime_error("observations csv row needs replicate,site_index,value: " + line);
    const long r = std::stol(a), i = std::stol(b);
    cells[{r, i}] = std::stod(c);
    max_r = std::max(max_r, r);
    max_i = std::max(max_i, i);
  }
  if (max_r < 0) throw std::runtime_error("observations csv has no rows: " + path);
  Eigen::MatrixXd obs(max_r + 1, max_i + 1);
  obs.setZero();
  for (const auto& [key, v] : cells) obs(key.first, key.second) = v;
  return obs;
}

void write_observations_binary(const SiteSet& sites, const Eigen::MatrixXd& obs,
                               const std::string& path) {
  auto f = open_out(path, std::ios::binary);
  put<int64_t>(f, sites.dim);
  put<int64_t>(f, sites.n);
  put<double>(f, sites.tau);
  put<uint64_t>(f, sites.seed);
  f.write(reinterpret_cast<const char*>(sites.coords.data()),
          static_cast<std::streamsize>(sites.coords.size() * sizeof(double)));
  put<int64_t>(f, obs.rows());
  for (Eigen::Index r = 0; r < obs.rows(); ++r)
    for (Eigen::Index i = 0; i < obs.cols(); ++i) put<double>(f, obs(r, i));
}

}  // namespace gwfit

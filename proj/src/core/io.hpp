#pragma once

#include <string>

#include <Eigen/Dense>

#include "core/grid.hpp"

namespace gwfit {

// CSV: header "index,x1,..,xd", one site per row.
void write_sites_csv(const SiteSet& sites, const std::string& path);
SiteSet read_sites_csv(const std::string& path, double tau = 0.0, uint64_t seed = 0);

// Compact binary: int64 d, int64 n, float64 tau, uint64 seed, then n*d
// little-endian float64 coordinates.
void write_sites_binary(const SiteSet& sites, const std::string& path);
SiteSet read_sites_binary(const std::string& path);

// CSV: header "replicate,site_index,value".
void write_observations_csv(const Eigen::MatrixXd& obs, const std::string& path);
Eigen::MatrixXd read_observations_csv(const std::string& path);

// Site binary format extended with a replicate dimension: the site block,
// then int64 replicates, then replicates*n float64 values.
void write_observations_binary(const SiteSet& sites, const Eigen::MatrixXd& obs,
                               const std::string& path);

}  // namespace gwfit

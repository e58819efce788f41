#pragma once

#include <filesystem>
#include <string>

#include "malab/torus_grid.hpp"
#include "oracles.hpp"

namespace fixtures {

inline malab::HermitianMatrix to_small(const oracle::Matrix& m) { return m; }
inline oracle::Matrix to_dense(const malab::HermitianMatrix& m) { return m; }

/// A fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

std::string read_file(const std::filesystem::path& path);
int count_lines(const std::string& text);

/// sup |a - b| after removing each mean.
double sup_error_mod_constants(const malab::PotentialField& a, const malab::PotentialField& b);

}  // namespace fixtures

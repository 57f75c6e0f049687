#pragma once

// Result files.
//
// Sweep CSV header:
//   mode,sweep_value,ber,errors,symbols,rho_c_hat,rho_c_tilde,rho_h_hat,rho_h_bar,rho_r_hat,seed
// Trajectory CSV header:
//   n,true_re,true_im,est_re,est_im,damped_re,damped_im

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "uwfd/experiments.hpp"

namespace uwfd {

inline constexpr const char* kSweepCsvHeader =
    "mode,sweep_value,ber,errors,symbols,rho_c_hat,rho_c_tilde,rho_h_hat,rho_h_bar,rho_r_hat,seed";
inline constexpr const char* kTrajectoryCsvHeader = "n,true_re,true_im,est_re,est_im,damped_re,damped_im";

void write_sweep_csv(std::ostream& out, const SweepTable& table);
void write_sweep_csv(const std::filesystem::path& path, const SweepTable& table);
SweepTable read_sweep_csv(const std::filesystem::path& path);

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& samples);
void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectorySample>& samples);
std::vector<TrajectorySample> read_trajectory_csv(const std::filesystem::path& path);

}  // namespace uwfd

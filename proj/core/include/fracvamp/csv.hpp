#pragma once

#include <filesystem>
#include <string>

#include "fracvamp/sweep.hpp"

namespace fracvamp {

// Shortest decimal form with 17 significant digits; round-trips any double.
std::string format_g17(double x);

// Writes content to a temporary file in the target directory, then renames
// it into place, so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path,
                  const std::string& content);

// Throws IoError unless a file can be created at `path`.
void check_writable(const std::filesystem::path& path);

// Per-cell summary: case,mode,d,e,mean_nmse,std_nmse,fail_count,trials,mean_kappa
void write_cell_summary_csv(const std::filesystem::path& path,
                            const SweepResult& result);

// Per-trial detail: cell_id,trial,seed,kappa,nmse_iter_1..K
void write_trial_csv(const std::filesystem::path& path,
                     const SweepResult& result);

// Grid minima per (case, mode): case,mode,d,e,NMSE
void write_minima_csv(const std::filesystem::path& path,
                      const SweepResult& result);

}  // namespace fracvamp

#include "fracvamp/csv.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

namespace fracvamp {

namespace fs = std::filesystem;

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  std::error_code ec;
  const fs::path parent = path.parent_path();
  if (!parent.empty()) {
    fs::create_directories(parent, ec);
    if (ec) throw IoError("cannot create directory " + parent.string());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

void check_writable(const fs::path& path) {
  std::error_code ec;
  const fs::path parent = path.parent_path();
  if (!parent.empty()) {
    fs::create_directories(parent, ec);
    if (ec) throw IoError("cannot create directory " + parent.string());
  }
  const fs::path probe = path.string() + ".probe";
  std::ofstream out(probe, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("output path not writable: " + path.string());
  out.close();
  fs::remove(probe, ec);
}

void write_cell_summary_csv(const fs::path& path, const SweepResult& result) {
  std::string body = "case,mode,d,e,mean_nmse,std_nmse,fail_count,trials,mean_kappa\n";
  for (const auto& cell : result.cells) {
    body += to_string(cell.damping);
    body += ',';
    body += to_string(cell.mode);
    body += ',';
    body += format_g17(cell.d);
    body += ',';
    body += format_g17(cell.e);
    body += ',';
    body += format_g17(cell.mean_nmse);
    body += ',';
    body += format_g17(cell.std_nmse);
    body += ',';
    body += std::to_string(cell.fail_count);
    body += ',';
    body += std::to_string(cell.trials);
    body += ',';
    body += format_g17(cell.mean_kappa);
    body += '\n';
  }
  atomic_write(path, body);
}

void write_trial_csv(const fs::path& path, const SweepResult& result) {
  // cell_id here is the summary row index, so trial rows join uniquely onto
  // the summary even when several cases/modes share a (d, e) instance set.
  std::string body = "cell_id,trial,seed,kappa";
  for (int k = 1; k <= result.iterations; ++k) {
    body += ",nmse_iter_" + std::to_string(k);
  }
  body += '\n';
  const int trials_per_cell =
      result.cells.empty() ? 1 : result.cells.front().trials;
  std::size_t slot = 0;
  for (const auto& rec : result.trials) {
    const std::size_t row = slot / trials_per_cell;
    body += std::to_string(row);
    body += ',';
    body += std::to_string(rec.trial);
    body += ',';
    body += std::to_string(rec.seed);
    body += ',';
    body += format_g17(rec.kappa);
    for (int k = 0; k < result.iterations; ++k) {
      body += ',';
      body += k < static_cast<int>(rec.nmse_per_iteration.size())
                  ? format_g17(rec.nmse_per_iteration[k])
                  : "nan";
    }
    body += '\n';
    ++slot;
  }
  atomic_write(path, body);
}

void write_minima_csv(const fs::path& path, const SweepResult& result) {
  std::string body = "case,mode,d,e,NMSE\n";
  for (const auto& m : result.minima) {
    body += to_string(m.damping);
    body += ',';
    body += to_string(m.mode);
    body += ',';
    body += format_g17(m.d);
    body += ',';
    body += format_g17(m.e);
    body += ',';
    body += format_g17(m.nmse);
    body += '\n';
  }
  atomic_write(path, body);
}

}  // namespace fracvamp

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vlab/config.hpp"
#include "vlab/kernel.hpp"
#include "vlab/pointwise.hpp"
#include "vlab/solver.hpp"
#include "vlab/stability.hpp"

namespace vlab {

// Reproducibility header stamped on every artifact: tool version, config
// hash, seed, the resolved config itself, and a timestamp. Reruns with the
// same config and seed are byte-identical except for the "generated" line,
// which consumers strip before comparing.
struct ArtifactMeta {
    std::string tool = "vortexlab";
    std::string version = "0.1.0";
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    Settings config;
    bool timestamp = true;
};

// shortest round-trip decimal form
std::string format_double(double v);
std::string hex64(std::uint64_t v);
std::string utc_now();

// temp file in the same directory, then rename
void atomic_write_text(const std::string& path, const std::string& content);

std::string csv_header(const ArtifactMeta& meta);

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const ArtifactMeta& meta, std::size_t stride = 1);
void write_residuals_csv(const std::string& path, const std::vector<double>& residuals,
                         const ArtifactMeta& meta);
void write_kernel_audit_csv(const std::string& path, const KernelAuditReport& rep,
                            const ArtifactMeta& meta);
void write_pointwise_audit_csv(const std::string& path, const PointwiseAuditReport& rep,
                               const ArtifactMeta& meta);
void write_stability_csv(const std::string& path, const StabilityReport& rep,
                         const ArtifactMeta& meta);
void write_time_audit_csv(const std::string& path, const TimeContinuityReport& rep,
                          const ArtifactMeta& meta);
void write_modulus_table_csv(const std::string& path, const std::vector<double>& r,
                             const std::vector<double>& mu, const std::vector<double>& m,
                             const std::vector<double>& nu, const ArtifactMeta& meta);

// Binary snapshot: magic "YUDO1", then little-endian u64 n, u64 steps, then
// (steps + 1) frames of n xy-pairs of f64, row-major.
void write_trajectory_binary(const std::string& path, const Trajectory& traj);

struct TrajectorySnapshot {
    std::uint64_t n = 0;
    std::uint64_t steps = 0;
    std::vector<Vec2> positions; // (steps + 1) * n
};

TrajectorySnapshot read_trajectory_binary(const std::string& path);

} // namespace vlab

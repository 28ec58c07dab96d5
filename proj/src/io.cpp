#include "vlab/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace vlab {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary snapshots are written as raw little-endian doubles");

void append_row_end(std::string& out) { out += "\n"; }

void append_field(std::string& out, const std::string& s, bool first = false)
{
    if (!first)
        out += ",";
    out += s;
}

void append_field(std::string& out, double v, bool first = false)
{
    append_field(out, format_double(v), first);
}

std::string read_all(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("io: cannot open '" + path + "'");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_now()
{
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void atomic_write_text(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("io: cannot write '" + tmp + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw std::runtime_error("io: short write to '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw std::runtime_error("io: rename '" + tmp + "' -> '" + path +
                                 "' failed: " + ec.message());
}

std::string csv_header(const ArtifactMeta& meta)
{
    std::string out;
    out += "# tool: " + meta.tool + " " + meta.version + "\n";
    out += "# config: " + hex64(meta.config_hash) + "\n";
    out += "# seed: " + std::to_string(meta.seed) + "\n";
    if (meta.timestamp)
        out += "# generated: " + utc_now() + "\n";
    for (const auto& [k, v] : meta.config.kv)
        out += "# cfg " + k + " = " + v + "\n";
    return out;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const ArtifactMeta& meta, std::size_t stride)
{
    if (stride == 0) { // cap the row count, keep the binary for full detail
        stride = 1;
        while ((traj.steps + stride) / stride > 256)
            stride *= 2;
    }
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k <= traj.steps; k += stride)
        kept.push_back(k);
    if (kept.back() != traj.steps) // the final frame always ships
        kept.push_back(traj.steps);

    std::string out = csv_header(meta);
    out += "time,label_id,label_x,label_y,pos_x,pos_y,weight,omega\n";
    for (const std::size_t k : kept) {
        const Vec2* f = traj.frame(k);
        for (std::size_t i = 0; i < traj.n; ++i) {
            append_field(out, traj.time_at(k), true);
            append_field(out, std::to_string(i));
            append_field(out, traj.base.labels[i].x);
            append_field(out, traj.base.labels[i].y);
            append_field(out, f[i].x);
            append_field(out, f[i].y);
            append_field(out, traj.base.weights[i]);
            append_field(out, traj.base.values[i]);
            append_row_end(out);
        }
    }
    atomic_write_text(path, out);
}

void write_residuals_csv(const std::string& path, const std::vector<double>& residuals,
                         const ArtifactMeta& meta)
{
    std::string out = csv_header(meta);
    out += "iteration,residual\n";
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        append_field(out, std::to_string(i + 1), true);
        append_field(out, residuals[i]);
        append_row_end(out);
    }
    atomic_write_text(path, out);
}

void write_kernel_audit_csv(const std::string& path, const KernelAuditReport& rep,
                            const ArtifactMeta& meta)
{
    std::string out = csv_header(meta);
    out += "sample_id,|x-y|,|K|,bound_ratio\n";
    for (const auto& row : rep.rows) {
        append_field(out, std::to_string(row.sample_id), true);
        append_field(out, row.separation);
        append_field(out, row.magnitude);
        append_field(out, row.bound_ratio);
        append_row_end(out);
    }
    atomic_write_text(path, out);
}

void write_pointwise_audit_csv(const std::string& path, const PointwiseAuditReport& rep,
                               const ArtifactMeta& meta)
{
    std::string out = csv_header(meta);
    out += "M,integral,bound,ratio,map,kind\n";
    for (const auto& row : rep.rows) {
        append_field(out, row.m, true);
        append_field(out, row.integral);
        append_field(out, row.bound);
        append_field(out, row.ratio);
        append_field(out, row.map);
        append_field(out, std::to_string(row.integral_kind));
        append_row_end(out);
    }
    atomic_write_text(path, out);
}

void write_stability_csv(const std::string& path, const StabilityReport& rep,
                         const ArtifactMeta& meta)
{
    std::string out = csv_header(meta);
    out += "t,eps,d,nu_d,envelope,pass\n";
    for (const auto& cell : rep.cells) {
        append_field(out, cell.t, true);
        append_field(out, cell.eps);
        append_field(out, cell.d);
        append_field(out, cell.nu_d);
        append_field(out, cell.envelope);
        append_field(out, std::string(cell.pass ? "1" : "0"));
        append_row_end(out);
    }
    atomic_write_text(path, out);
}

void write_time_audit_csv(const std::string& path, const TimeContinuityReport& rep,
                          const ArtifactMeta& meta)
{
    std::string out = csv_header(meta);
    out += "t,dist,envelope\n";
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        append_field(out, rep.times[k], true);
        append_field(out, rep.dist[k]);
        append_field(out, rep.envelope[k]);
        append_row_end(out);
    }
    atomic_write_text(path, out);
}

void write_modulus_table_csv(const std::string& path, const std::vector<double>& r,
                             const std::vector<double>& mu, const std::vector<double>& m,
                             const std::vector<double>& nu, const ArtifactMeta& meta)
{
    if (mu.size() != r.size() || m.size() != r.size() || nu.size() != r.size())
        throw std::invalid_argument("io: modulus table columns differ in length");
    std::string out = csv_header(meta);
    out += "r,mu,big_m,nu\n";
    for (std::size_t i = 0; i < r.size(); ++i) {
        append_field(out, r[i], true);
        append_field(out, mu[i]);
        append_field(out, m[i]);
        append_field(out, nu[i]);
        append_row_end(out);
    }
    atomic_write_text(path, out);
}

void write_trajectory_binary(const std::string& path, const Trajectory& traj)
{
    std::string out;
    out.reserve(5 + 16 + traj.data.size() * sizeof(Vec2));
    out.append("YUDO1", 5);
    const std::uint64_t n = traj.n, steps = traj.steps;
    out.append(reinterpret_cast<const char*>(&n), 8);
    out.append(reinterpret_cast<const char*>(&steps), 8);
    out.append(reinterpret_cast<const char*>(traj.data.data()),
               traj.data.size() * sizeof(Vec2));
    atomic_write_text(path, out);
}

TrajectorySnapshot read_trajectory_binary(const std::string& path)
{
    const std::string data = read_all(path);
    if (data.size() < 21 || data.compare(0, 5, "YUDO1") != 0)
        throw std::runtime_error("io: '" + path + "' is not a trajectory snapshot");
    TrajectorySnapshot snap;
    std::memcpy(&snap.n, data.data() + 5, 8);
    std::memcpy(&snap.steps, data.data() + 13, 8);
    const std::size_t count = snap.n * (snap.steps + 1);
    if (data.size() != 21 + count * sizeof(Vec2))
        throw std::runtime_error("io: '" + path + "' is truncated");
    snap.positions.resize(count);
    std::memcpy(snap.positions.data(), data.data() + 21, count * sizeof(Vec2));
    return snap;
}

} // namespace vlab

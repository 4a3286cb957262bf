// Artifact emission: deterministic CSV/JSON writers for run series, frame
// snapshots, mode trajectories, membership traces and stability tables, a
// JSONL probe log that doubles as the sweep checkpoint, and SHA-256 checksum
// manifests. All floating-point output goes through %.17g, so identical
// inputs produce byte-identical files.
#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ringblow/core_model.hpp"
#include "ringblow/radial_solver.hpp"
#include "ringblow/selfsim_frame.hpp"
#include "ringblow/shooting.hpp"
#include "ringblow/shrinking_set.hpp"

namespace ringblow {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

// --- CSV builders ------------------------------------------------------------

// Per-run series `t,s,sup_u,r_argmax`. The s column is -log(T_est - t) when
// the estimated blow-up time covers the sample, otherwise the sup-ratio proxy
// (p-1) log(sup/kappa) used by free runs.
inline std::string series_csv(const BlowupReport& rep, const ModelParams& mp) {
    const double kappa = kappa_const(mp.p);
    std::ostringstream out;
    out << "t,s,sup_u,r_argmax\n";
    for (const auto& pt : rep.series) {
        double s;
        if (std::isfinite(rep.T_est) && pt.t < rep.T_est)
            s = -std::log(rep.T_est - pt.t);
        else
            s = (mp.p - 1.0) * std::log(std::max(pt.sup_u / kappa, 1e-300));
        out << fmt_g17(pt.t) << ',' << fmt_g17(s) << ',' << fmt_g17(pt.sup_u) << ','
            << fmt_g17(pt.r_argmax) << '\n';
    }
    return out.str();
}

// Self-similar frame snapshot `y,W,phi,q` at one s.
inline std::string frame_csv(const SelfSimilarFrame& frame, const CutoffParams& cp) {
    std::vector<double> q = residual_q(frame, cp);
    std::ostringstream out;
    out << "y,W,phi,q\n";
    for (std::size_t i = 0; i < frame.y.size(); ++i)
        out << fmt_g17(frame.y[i]) << ',' << fmt_g17(frame.W[i]) << ','
            << fmt_g17(profile_phi(frame.y[i], frame.s, frame.params)) << ','
            << fmt_g17(q[i]) << '\n';
    return out.str();
}

// Mode trajectories `s,q0,q1,q2,qminus_wnorm,qe_sup`.
inline std::string modes_csv(const std::vector<ModeSeriesPoint>& series) {
    std::ostringstream out;
    out << "s,q0,q1,q2,qminus_wnorm,qe_sup\n";
    for (const auto& pt : series)
        out << fmt_g17(pt.s) << ',' << fmt_g17(pt.q0) << ',' << fmt_g17(pt.q1) << ','
            << fmt_g17(pt.q2) << ',' << fmt_g17(pt.qminus_wnorm) << ','
            << fmt_g17(pt.qe_sup) << '\n';
    return out.str();
}

// Membership trace
// `s,in_set,tightest,margin_q0,margin_q1,margin_q2,margin_qminus,margin_qe,margin_regular`.
inline std::string membership_csv(const std::vector<MembershipReport>& reports) {
    std::ostringstream out;
    out << "s,in_set,tightest,margin_q0,margin_q1,margin_q2,margin_qminus,"
           "margin_qe,margin_regular\n";
    for (const auto& r : reports)
        out << fmt_g17(r.s) << ',' << (r.in_set ? 1 : 0) << ',' << r.tightest << ','
            << fmt_g17(r.margin_q0) << ',' << fmt_g17(r.margin_q1) << ','
            << fmt_g17(r.margin_q2) << ',' << fmt_g17(r.margin_qminus) << ','
            << fmt_g17(r.margin_qe) << ',' << fmt_g17(r.margin_regular) << '\n';
    return out.str();
}

// Stability table `delta,dir,blew_up,dT,dr_blow,ring_count`.
inline std::string stability_csv(const std::vector<StabilityRow>& rows) {
    std::ostringstream out;
    out << "delta,dir,blew_up,dT,dr_blow,ring_count\n";
    for (const auto& r : rows)
        out << fmt_g17(r.delta) << ',' << r.dir << ',' << (r.blew_up ? 1 : 0) << ','
            << fmt_g17(r.dT) << ',' << fmt_g17(r.dr_blow) << ',' << r.ring_count << '\n';
    return out.str();
}

// --- JSON builders -----------------------------------------------------------

// JSON has no NaN/inf; non-finite diagnostics are emitted as null.
inline nlohmann::json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

inline double json_number_back(const nlohmann::json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

inline nlohmann::json summary_json(const BlowupReport& rep) {
    return nlohmann::json{{"T_est", json_number(rep.T_est)},
                          {"r_blow", json_number(rep.r_blow)},
                          {"stop_reason", rep.stop_reason},
                          {"step_count", rep.step_count}};
}

struct ProfileReport {
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double D_series_ref = std::numeric_limits<double>::quiet_NaN();
    double ustar_max_dev = std::numeric_limits<double>::quiet_NaN();
    double W_sup_max = std::numeric_limits<double>::quiet_NaN();
    bool single_ring = false;
    bool regular_region_ok = false;
};

inline nlohmann::json profile_report_json(const ProfileReport& r) {
    return nlohmann::json{{"alpha", json_number(r.alpha)},
                          {"D_series_ref", json_number(r.D_series_ref)},
                          {"ustar_max_dev", json_number(r.ustar_max_dev)},
                          {"W_sup_max", json_number(r.W_sup_max)},
                          {"single_ring", r.single_ring},
                          {"regular_region_ok", r.regular_region_ok}};
}

// --- sweep probe log (JSONL) -------------------------------------------------

// One evaluated parameter point of the shooting sweep. The log of these
// records *is* the checkpoint: a restarted sweep replays completed points
// from the log instead of re-integrating them.
struct ProbeRecord {
    double d0 = 0.0;
    double d1 = 0.0;
    std::string result;  // survived | exit | no-blowup | diverged
    double s_exit = 0.0; // exit time, or the last tracked s for survivors
    int mode = -1;
    int omega = 0;
    double phi0 = 0.0;   // exit-map value (zero unless result == "exit")
    double phi1 = 0.0;
    double T_est = std::numeric_limits<double>::quiet_NaN();
    double r_blow = std::numeric_limits<double>::quiet_NaN();
};

inline std::string probe_key(double d0, double d1) {
    return fmt_g17(d0) + "," + fmt_g17(d1);
}

inline nlohmann::json probe_to_json(const ProbeRecord& p) {
    return nlohmann::json{{"d0", p.d0},
                          {"d1", p.d1},
                          {"result", p.result},
                          {"s_exit", p.s_exit},
                          {"mode", p.mode},
                          {"omega", p.omega},
                          {"phi", {json_number(p.phi0), json_number(p.phi1)}},
                          {"T_est", json_number(p.T_est)},
                          {"r_blow", json_number(p.r_blow)}};
}

inline ProbeRecord probe_from_json(const nlohmann::json& j) {
    ProbeRecord p;
    p.d0 = j.at("d0").get<double>();
    p.d1 = j.at("d1").get<double>();
    p.result = j.at("result").get<std::string>();
    p.s_exit = j.at("s_exit").get<double>();
    p.mode = j.at("mode").get<int>();
    p.omega = j.at("omega").get<int>();
    p.phi0 = json_number_back(j.at("phi").at(0));
    p.phi1 = json_number_back(j.at("phi").at(1));
    p.T_est = json_number_back(j.at("T_est"));
    p.r_blow = json_number_back(j.at("r_blow"));
    return p;
}

// Load a probe log, tolerating a truncated final line (the expected state
// after an interrupted run). Malformed lines are skipped, not fatal.
inline std::vector<ProbeRecord> read_probe_log(std::istream& in) {
    std::vector<ProbeRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        try {
            out.push_back(probe_from_json(j));
        } catch (const nlohmann::json::exception&) {
            continue;
        }
    }
    return out;
}

// --- files, checksums, manifest ----------------------------------------------

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return ss.str();
}

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int n = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &n, EVP_sha256(), nullptr) != 1)
        throw IoError("sha256 digest failed");
    static const char hex[] = "0123456789abcdef";
    std::string out(2 * n, '0');
    for (unsigned int i = 0; i < n; ++i) {
        out[2 * i] = hex[md[i] >> 4];
        out[2 * i + 1] = hex[md[i] & 0xf];
    }
    return out;
}

// Checksum manifest over the named files (paths relative to dir), sorted by
// path so the manifest itself is deterministic.
inline void write_manifest(const std::filesystem::path& dir,
                           std::vector<std::string> rel_paths) {
    std::sort(rel_paths.begin(), rel_paths.end());
    nlohmann::json artifacts = nlohmann::json::array();
    for (const auto& rel : rel_paths) {
        std::string bytes = read_file(dir / rel);
        artifacts.push_back({{"path", rel},
                             {"bytes", bytes.size()},
                             {"sha256", sha256_hex(bytes)}});
    }
    nlohmann::json manifest{{"artifacts", artifacts}};
    write_file(dir / "manifest.json", manifest.dump(1) + "\n");
}

// Re-hash every artifact a manifest names; returns the problems found
// (missing files, size or checksum mismatches), empty when all verify.
inline std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
    std::vector<std::string> problems;
    nlohmann::json manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
    for (const auto& entry : manifest.at("artifacts")) {
        std::string rel = entry.at("path").get<std::string>();
        std::filesystem::path p = dir / rel;
        if (!std::filesystem::exists(p)) {
            problems.push_back(rel + ": missing");
            continue;
        }
        std::string bytes = read_file(p);
        if (bytes.size() != entry.at("bytes").get<std::size_t>())
            problems.push_back(rel + ": size mismatch");
        else if (sha256_hex(bytes) != entry.at("sha256").get<std::string>())
            problems.push_back(rel + ": checksum mismatch");
    }
    return problems;
}

}  // namespace ringblow

#pragma once
// Persistence and identity: SHA-256, run configuration (TOML or JSON in, one
// canonical JSON out feeding the hash), binary snapshots, atomic CSV output.

#include "nsv/patch/patch.hpp"
#include "nsv/solver/state.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nsv::io {

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);

// Raised on malformed configs; message carries file/line or the field path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    // [grid]
    int n = 128;
    double L = 6.283185307179586;
    // [law]
    double a = 1.0;
    double gamma = 2.0;
    double rho_tilde = 1.0;
    double rho_max = 4.0;
    // [flow]
    double mu = 0.1;
    double lambda = 1.0;
    double cfl_advective = 0.4;
    double cfl_acoustic = 0.5;
    double dt_override = 0.0;
    bool dealias = true;
    // [time]
    double t_end = 1.0;
    double sample_dt = 0.05;
    // [initial]
    std::string initial_type = "smooth";  // equilibrium | smooth | taylor-green | patch
    double rho_amp = 0.1;                 // smooth: single-mode density perturbation
    double u_amp = 1.0;                   // smooth / taylor-green swirl amplitude
    patch::PatchSpec patch;               // initial_type == "patch"
    // [tracking]
    bool family = false;          // build and transport the tangential family
    int markers = 0;              // > 0: advect an interface marker chain
    double p = 4.0;               // Lebesgue exponent of the striated norms
    bool track_decomposition = true;
    // [output]
    std::string out_dir = "out";
    std::string prefix = "run";
    double snapshot_dt = 0.0;     // > 0: periodic snapshots
    // [sweep] (only consulted by the sweep subcommand)
    std::vector<double> sweep_nus;       // bulk viscosities, strictly increasing
    bool sweep_with_reference = true;    // also run the incompressible reference

    std::uint64_t seed = 0x9e3779b97f4a7c15ull;

    // normalized form with defaults materialized; equal runs hash equally
    // regardless of the input syntax
    std::string canonical_json() const;
    std::string config_hash() const;   // SHA-256 of canonical_json()
};

// Parses .json or .toml content by extension (fallback: first non-space
// byte '{' means JSON). Unknown keys are errors.
RunConfig parse_config(const std::string& text, const std::string& filename);
RunConfig load_config(const std::string& path);

// --- snapshots ---

struct Snapshot {
    int n = 0;
    double L = 0.0;
    double t = 0.0;
    std::string config_hash;
    spectral::ScalarField rho;
    spectral::VectorField u;
    std::vector<spectral::VectorField> families;
    patch::MarkerCurve markers;
};

// Little-endian binary, magic "SNSV1": header, manifest (name, components,
// absolute offset), marker block, then field payloads row-major x-fastest,
// vector fields component-planar. Written atomically (temp + rename).
void snapshot_write(const std::string& path, const solver::FluidState& s,
                    const std::string& config_hash,
                    const std::vector<spectral::VectorField>& families = {},
                    const patch::MarkerCurve& markers = {});
Snapshot snapshot_read(const std::string& path);

// --- CSV ---

// Buffers everything; close() writes temp + rename. Destructor without
// close() discards (failed runs leave no half-written table behind).
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void comment(const std::string& text);  // "# " prefixed
    void line(const std::string& text);
    void close();

private:
    std::string path_;
    std::string buf_;
    bool closed_ = false;
};

void write_file_atomic(const std::string& path, const std::string& content);

} // namespace nsv::io

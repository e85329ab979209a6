#pragma once
/* Persistence: datasets, window sets, certificates, controllers, CSV
 * reports.  Text formats throughout — diffable, schema-tagged on the first
 * line, streamable at millions of records.  Floats round-trip exactly
 * (hexfloat in datasets, shortest-round-trip JSON in certificates).
 * Derived files record the fnv1a64 of their inputs; consumers re-hash and
 * refuse to run on mismatched chains. */

#include <optional>
#include <string>
#include <vector>

#include "salca/abstraction.hpp"
#include "salca/pac.hpp"
#include "salca/qlearn.hpp"
#include "salca/sampler.hpp"
#include "salca/synthesis.hpp"

namespace salca {

// Bad configuration, arguments, or file contents (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input file does not match the hash recorded at build time (exit code 3).
struct ProvenanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "fnv1a64:<16 hex digits>" of the file's bytes.
std::string file_hash(const std::string& path);

void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

struct WindowsDoc {
    WindowSet w;
    std::string system;
    std::string dataset_hash;
};

void save_windows(const WindowSet& w, const std::string& system, const std::string& dataset_hash,
                  const std::string& path);
WindowsDoc load_windows(const std::string& path);

struct ExtensionNote {
    std::string method;          // "nu" or "contracting"
    int extra = 0;               // T (nu mode)
    double lambda = 0;           // nu mode
    double nu = 0;               // nu mode
    double eps_bar_extended = 0; // nu mode: min(1, nu * eps_bar)
    int extended_horizon = 0;    // H + T (nu mode) or the validated H (contracting)
    int k_bar = -1;              // contracting mode
    double rho = 0;              // contracting mode
    bool resample_needed = false;  // contracting mode: certificate's H < k_bar
};

struct CertificateDoc {
    PacCertificate cert;
    std::string system;
    std::string dataset_hash;
    std::string abstraction_hash;
    double solver_rel_tol = 1e-9;
    std::optional<ExtensionNote> extension;
};

void save_certificate(const CertificateDoc& doc, const std::string& path);
CertificateDoc load_certificate(const std::string& path);

void save_controller(const AbstractController& c, const Salca& a,
                     const std::string& abstraction_hash, const std::string& path);

struct ControllerDoc {
    std::vector<std::string> goal;
    std::vector<std::string> avoid;
    std::string abstraction_hash;
    // per winning state: its window, rank, allowed input indices
    std::vector<LSequence> windows;
    std::vector<int> ranks;
    std::vector<std::vector<Symbol>> allowed;
};

ControllerDoc load_controller_doc(const std::string& path);

// Re-bind a persisted controller to an abstraction (must be the one it was
// synthesized from; windows that are not states fail the binding).
AbstractController attach_controller(const ControllerDoc& doc, const Salca& a);

// Dense numeric grid document; values round-trip bit-exactly.
void save_qtable(const QTable& q, const std::string& path);
QTable load_qtable(const std::string& path);

// CSV emission with a "# <schema>" first line; fields are pre-rendered.
void save_csv(const std::string& schema, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows, const std::string& path);

std::string format_double(double v);  // shortest exact decimal round-trip

}  // namespace salca

#pragma once

// Deterministic text emission: 17-significant-digit numbers so repeated runs
// are byte-identical and emitted files round-trip to full precision.

#include <string>
#include <utility>
#include <vector>

#include "lasernoise/fluctuation.hpp"
#include "lasernoise/params.hpp"
#include "lasernoise/steady.hpp"
#include "lasernoise/verification.hpp"

namespace lasernoise {

std::string format_g17(double v);

// Complex as a single CSV-safe token: "re+imi" / "re-imi".
std::string format_complex(const Complex& z);

// Ordered (key, value) echo of every model parameter.
std::vector<std::pair<std::string, std::string>>
param_echo(const ModelParams& p);

// Spectrum table, CSV: '#'-prefixed parameter header (plus caller-supplied
// extra lines), then "Omega,C_aa,C_bb,C_ab,d_aa,d_bb,d_ab" rows.
std::string spectrum_csv(const ModelParams& p,
                         const std::vector<SpectrumPoint>& pts,
                         const std::vector<std::string>& extra_header = {});

// Same data as JSON lines ('#' header lines, then one object per row with
// the column names as keys; complex values as "re+imi" strings).
std::string spectrum_jsonl(const ModelParams& p,
                           const std::vector<SpectrumPoint>& pts,
                           const std::vector<std::string>& extra_header = {});

// Human-readable stationary-state report.
std::string steady_text(const ModelParams& p, const DerivedRates& d,
                        const SteadyState& s, const ValidityReport& rep);

// Human-readable and machine-readable verification reports.
std::string verification_text(const FullVerification& v);
std::string verification_jsonl(const FullVerification& v);

// Writes content to path; throws IoError on failure.
void write_file(const std::string& path, const std::string& content);

} // namespace lasernoise

#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "umwave/manifold.hpp"
#include "umwave/metrics.hpp"
#include "umwave/solvers.hpp"

namespace umwave {

/// Decimal with 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

/// Columns iter,epoch,f,e,P,grad_norm,step,grad_units,wall_ns. With
/// `zero_wall_clock` every wall_ns is written as 0 so runs compare byte-wise.
void write_history_csv(std::ostream& os, const SolverReport& report, bool zero_wall_clock);

/// Line 1: `alpha,<value>`; then N rows of M `re,im` pairs.
void write_waveform_csv(std::ostream& os, const ProductPoint& p);

/// Parses a waveform file written by write_waveform_csv. Throws
/// EvaluationError on a shape mismatch or when an entry's modulus deviates
/// from 1 by more than `modulus_tol`; accepted entries are renormalized.
ProductPoint read_waveform_csv(const std::filesystem::path& path, int n, int m,
                               double modulus_tol = 1e-6);

void write_beampattern_csv(std::ostream& os, const BeampatternCurve& curve);
void write_correlation_csv(std::ostream& os, const CorrelationTable& table);

}  // namespace umwave

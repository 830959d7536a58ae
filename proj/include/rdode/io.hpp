#pragma once

#include <string>

#include "rdode/dynamics.hpp"
#include "rdode/spectra.hpp"
#include "rdode/steady.hpp"

namespace rdode {

// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_g17(double value);

// steady.csv: header x,u_1..u_m,v_1..v_k,branch_label; one row per node.
void write_steady_csv(const std::string& path, const SteadyState& steady, const Grid& grid);

// Reads a steady.csv back, inferring m and k from the header.
SteadyState load_steady_csv(const std::string& path, int* grid_n_out = nullptr);

// spectrum.csv: header re,im,kind with kind in {essential, discrete, discarded}.
void write_spectrum_csv(const std::string& path, const SpectrumReport& report);

// trace.csv: header t,sup_norm,l2_norm.
void write_trace_csv(const std::string& path, const SimulationTrace& trace);

}  // namespace rdode

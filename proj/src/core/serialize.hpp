#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "core/blowup.hpp"
#include "core/field.hpp"
#include "core/frame.hpp"
#include "core/vorticity.hpp"

namespace hodo {

std::string catastrophe_json(const CatastropheResult& r);
std::string laurent_json(const LaurentFit& f);
std::string frame_json(const AdaptedFrame& f);
std::string spatial_fit_json(const SpatialFit& f);

// One row per (u, root): "u1,u2[,u3],label,t,multiplicity"; maps with no
// real root at u emit a single row with empty t and multiplicity fields.
// `labels` may be empty (column omitted); otherwise one label per set.
void write_surface_csv(std::ostream& os,
                       const std::vector<BlowupBranchSet>& sets,
                       const std::vector<std::string>& labels);

void write_locus_csv(std::ostream& os, const std::vector<LocusPoint>& pts);

// "t,<headers...>" followed by one row per sample.
void write_series_csv(std::ostream& os, const std::vector<std::string>& headers,
                      const std::vector<double>& t,
                      const std::vector<Vec>& values);

struct ExponentRow {
  Vec u;
  double t_b = 0.0;
  double slope = 0.0;
  double slope_err = 0.0;
  int level = 1;
};
void write_exponent_csv(std::ostream& os, const std::vector<ExponentRow>& rows);

// "x1,..,u1,..,branch,mask" per cell; mask 0 = converged.
void write_grid_csv(std::ostream& os, const FieldGrid& grid);

// Compact little-endian layout: magic "HVGRID01", u32 dim, per axis
// (f64 lo, f64 hi, u32 count), f64 t, then per cell in storage order the u
// components, the branch index, and the mask, all as f64.
void write_grid_binary(std::ostream& os, const FieldGrid& grid);
FieldGrid read_grid_binary(std::istream& is);

// Formats a double with enough digits to round-trip.
std::string fmt_double(double v);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace hodo

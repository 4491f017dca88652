#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "modalshm/beam.hpp"
#include "modalshm/frf.hpp"
#include "modalshm/indices.hpp"
#include "modalshm/modal_set.hpp"
#include "modalshm/stabilization.hpp"
#include "modalshm/time_series.hpp"

namespace modalshm::io {

/// All writers emit LF line endings and 17-significant-digit floats, so a
/// given in-memory value always produces the same bytes.
std::string format_double(double value);

/// Time-series container: <dir>/meta.json + <dir>/ts.csv (header t,<ids...>).
void write_time_series(const std::filesystem::path& dir, const TimeSeriesSet& ts);
TimeSeriesSet read_time_series(const std::filesystem::path& dir);

/// FRF container: <dir>/meta.json + <dir>/frf.csv with rows
/// f_hz,out_id,in_id,re,im ordered by ascending f, then output, then input.
void write_frf(const std::filesystem::path& dir, const FrfDataset& frf);
FrfDataset read_frf(const std::filesystem::path& dir);
/// Output channel ids without loading the full tensor.
std::vector<std::string> read_frf_output_ids(const std::filesystem::path& dir);

void write_modal_set(const std::filesystem::path& file, const ModalSet& set);
ModalSet read_modal_set(const std::filesystem::path& file);
std::string modal_set_to_json(const ModalSet& set);

void write_diagram_csv(const std::filesystem::path& file,
                       const StabilizationDiagram& diagram);
void write_diagram_json(const std::filesystem::path& file,
                        const StabilizationDiagram& diagram);

void write_damage_report(const std::filesystem::path& file, const DamageReport& report);
/// Combined table: case_id,mtmac,n_pairs,min_comac_dof,min_comac.
void write_combined_csv(const std::filesystem::path& file,
                        const std::vector<DamageReport>& reports);

void write_scenario(const std::filesystem::path& file, const DamageScenario& scenario);
DamageScenario read_scenario(const std::filesystem::path& file);

void write_beam_config(const std::filesystem::path& file, const BeamConfig& config);
BeamConfig read_beam_config(const std::filesystem::path& file);

}  // namespace modalshm::io

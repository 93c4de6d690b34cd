#pragma once

#include <string>

#include "cdpo/experiment.hpp"

namespace cdpo::lab {

// Three-panel learning-curve figure (cdpo by coefficient, ppo-ent by
// coefficient, aggregated averages) with shaded standard-error bands.
// A pure function of the summary: identical input produces identical bytes.
// Panels without any series render an explicit "no data" marker; an entirely
// empty summary is an error and writes nothing.
std::string render_learning_curves(const SweepSummary& summary);

// Renders into out_dir/learning_curves.svg and returns the file path.
std::string emit_plots(const SweepSummary& summary, const std::string& out_dir);

}  // namespace cdpo::lab

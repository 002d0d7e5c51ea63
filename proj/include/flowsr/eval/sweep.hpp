#pragma once

#include "flowsr/eval/metrics.hpp"
#include "flowsr/eval/testset.hpp"
#include "flowsr/fm/restore.hpp"
#include "flowsr/models/backbone.hpp"

namespace flowsr::eval {

struct SweepConfig {
  std::vector<int> nfe_list = {1, 2, 5, 10, 20};
  fm::OdeScheme scheme = fm::OdeScheme::kEuler;
  uint64_t seed = 0;
  dsp::StftConfig stft;
  dsp::CompressionParams compression;
  fm::FlowPathParams flow;
  int jobs = 1;
};

struct SweepRow {
  int nfe = 0;
  int clip = 0;
  uint64_t clip_seed = 0;      // identical across nfe values: paired draws
  std::string degradation_tag;
  double si_sdr_in = 0.0, si_sdr_out = 0.0;
  double lsd_in = 0.0, lsd_out = 0.0;
  double sc_in = 0.0, sc_out = 0.0;
  double rtf = 0.0;  // measured, reported separately from the metric columns
};

struct SweepAggregate {
  int nfe = 0;
  int clips = 0;
  double mean_si_sdr_out = 0.0;
  double mean_si_sdr_improvement = 0.0;
  double mean_lsd_out = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  // Order-independent: rows are summed in (nfe, clip) order regardless of
  // storage order.
  std::vector<SweepAggregate> aggregates() const;
  std::string to_csv() const;         // deterministic columns only
  std::string timing_csv() const;     // nfe, clip, rtf (measured, not replayable)
};

// Enhances every clip at every nfe with per-clip seeds held fixed across nfe
// values so comparisons are paired. Clip-level work may run on cfg.jobs
// threads; outputs land in preassigned slots, so the result is identical for
// any job count.
SweepResult nfe_sweep(const models::Backbone& model, const std::vector<TestClip>& clips,
                      const SweepConfig& cfg);

enum class BreakdownAxis { kInputQualityBin, kDegradationKind };

struct BreakdownRow {
  std::string bucket;
  int nfe = 0;
  double mean_improvement = 0.0;  // enhanced minus input si-sdr
  int count = 0;
};

// Mean improvement per (bucket x nfe). Input-quality buckets are quartiles of
// input si-sdr (q1 = worst); degradation buckets come from chain provenance
// tags and require them to be present. Buckets are ordered by descending
// overall mean improvement.
std::vector<BreakdownRow> breakdown_report(const SweepResult& sweep, BreakdownAxis axis);
std::string breakdown_csv(const std::vector<BreakdownRow>& rows);

}  // namespace flowsr::eval

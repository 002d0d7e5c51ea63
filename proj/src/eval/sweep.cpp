#include "flowsr/eval/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <sstream>
#include <thread>

#include "flowsr/util/error.hpp"
#include "flowsr/util/rng.hpp"

namespace flowsr::eval {

SweepResult nfe_sweep(const models::Backbone& model, const std::vector<TestClip>& clips,
                      const SweepConfig& cfg) {
  for (int nfe : cfg.nfe_list) fm::SamplerConfig{nfe, cfg.scheme}.validate();

  SweepResult result;
  result.rows.resize(cfg.nfe_list.size() * clips.size());
  const auto velocity = model.velocity_field();

  auto process = [&](size_t slot) {
    const size_t nfe_idx = slot / clips.size();
    const size_t clip_idx = slot % clips.size();
    const TestClip& clip = clips[clip_idx];

    fm::RestoreOptions opt;
    opt.stft = cfg.stft;
    opt.compression = cfg.compression;
    opt.flow = cfg.flow;
    opt.sampler = fm::SamplerConfig{cfg.nfe_list[nfe_idx], cfg.scheme};
    opt.seed = util::mix_seed(cfg.seed, static_cast<uint64_t>(clip.index), 0x636c6970ULL);

    const auto t0 = std::chrono::steady_clock::now();
    const auto enhanced = fm::restore(clip.noisy, velocity, opt);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    SweepRow row;
    row.nfe = cfg.nfe_list[nfe_idx];
    row.clip = clip.index;
    row.clip_seed = opt.seed;
    row.degradation_tag = clip.degradation_tag;
    const auto in_metrics = compute_metrics(clip.clean, clip.noisy, cfg.stft);
    const auto out_metrics = compute_metrics(clip.clean, enhanced, cfg.stft);
    row.si_sdr_in = in_metrics.si_sdr;
    row.si_sdr_out = out_metrics.si_sdr;
    row.lsd_in = in_metrics.lsd;
    row.lsd_out = out_metrics.lsd;
    row.sc_in = in_metrics.spectral_conv;
    row.sc_out = out_metrics.spectral_conv;
    row.rtf = elapsed / clip.noisy.duration_seconds();
    result.rows[slot] = std::move(row);
  };

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (size_t slot = 0; slot < result.rows.size(); ++slot) process(slot);
  } else {
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w]() {
        for (size_t slot = w; slot < result.rows.size(); slot += jobs) process(slot);
      });
    }
    for (auto& t : workers) t.join();
  }
  return result;
}

std::vector<SweepAggregate> SweepResult::aggregates() const {
  std::vector<const SweepRow*> sorted;
  sorted.reserve(rows.size());
  for (const auto& r : rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const SweepRow* a, const SweepRow* b) {
    return a->nfe != b->nfe ? a->nfe < b->nfe : a->clip < b->clip;
  });
  std::vector<SweepAggregate> out;
  for (const SweepRow* r : sorted) {
    if (out.empty() || out.back().nfe != r->nfe) out.push_back({r->nfe, 0, 0.0, 0.0, 0.0});
    auto& agg = out.back();
    agg.clips += 1;
    agg.mean_si_sdr_out += r->si_sdr_out;
    agg.mean_si_sdr_improvement += r->si_sdr_out - r->si_sdr_in;
    agg.mean_lsd_out += r->lsd_out;
  }
  for (auto& agg : out) {
    agg.mean_si_sdr_out /= agg.clips;
    agg.mean_si_sdr_improvement /= agg.clips;
    agg.mean_lsd_out /= agg.clips;
  }
  return out;
}

std::string SweepResult::to_csv() const {
  std::vector<const SweepRow*> sorted;
  for (const auto& r : rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const SweepRow* a, const SweepRow* b) {
    return a->nfe != b->nfe ? a->nfe < b->nfe : a->clip < b->clip;
  });
  std::ostringstream os;
  os << "row_type,nfe,clip,clip_seed,degradations,si_sdr_in,si_sdr_out,si_sdr_improvement,"
        "lsd_in,lsd_out,sc_in,sc_out\n";
  using util::format_double;
  for (const SweepRow* r : sorted) {
    os << "clip," << r->nfe << "," << r->clip << "," << r->clip_seed << ","
       << r->degradation_tag << "," << format_double(r->si_sdr_in) << ","
       << format_double(r->si_sdr_out) << "," << format_double(r->si_sdr_out - r->si_sdr_in)
       << "," << format_double(r->lsd_in) << "," << format_double(r->lsd_out) << ","
       << format_double(r->sc_in) << "," << format_double(r->sc_out) << "\n";
  }
  for (const auto& agg : aggregates()) {
    os << "mean," << agg.nfe << "," << agg.clips << ",,," << ","
       << format_double(agg.mean_si_sdr_out) << ","
       << format_double(agg.mean_si_sdr_improvement) << "," << ","
       << format_double(agg.mean_lsd_out) << ",,\n";
  }
  return os.str();
}

std::string SweepResult::timing_csv() const {
  std::vector<const SweepRow*> sorted;
  for (const auto& r : rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const SweepRow* a, const SweepRow* b) {
    return a->nfe != b->nfe ? a->nfe < b->nfe : a->clip < b->clip;
  });
  std::ostringstream os;
  os << "nfe,clip,rtf\n";
  for (const SweepRow* r : sorted) {
    os << r->nfe << "," << r->clip << "," << util::format_double(r->rtf) << "\n";
  }
  return os.str();
}

std::vector<BreakdownRow> breakdown_report(const SweepResult& sweep, BreakdownAxis axis) {
  if (sweep.rows.empty()) throw DataError("breakdown: empty sweep");

  // bucket per clip index
  std::map<int, std::string> bucket_of_clip;
  if (axis == BreakdownAxis::kDegradationKind) {
    for (const auto& r : sweep.rows) {
      if (r.degradation_tag.empty()) {
        throw DataError("breakdown by degradation kind needs provenance tags on every clip");
      }
      bucket_of_clip[r.clip] = r.degradation_tag;
    }
  } else {
    std::map<int, double> quality;
    for (const auto& r : sweep.rows) quality[r.clip] = r.si_sdr_in;
    std::vector<std::pair<double, int>> ranked;
    for (const auto& [clip, q] : quality) ranked.emplace_back(q, clip);
    std::sort(ranked.begin(), ranked.end());
    const size_t n = ranked.size();
    static const char* kNames[4] = {"q1_worst", "q2", "q3", "q4_best"};
    for (size_t i = 0; i < n; ++i) {
      const size_t quartile = std::min<size_t>(3, i * 4 / n);
      bucket_of_clip[ranked[i].second] = kNames[quartile];
    }
  }

  struct Acc {
    double sum = 0.0;
    int count = 0;
  };
  std::map<std::pair<std::string, int>, Acc> cells;
  std::map<std::string, Acc> overall;
  for (const auto& r : sweep.rows) {
    const std::string& bucket = bucket_of_clip[r.clip];
    auto& cell = cells[{bucket, r.nfe}];
    const double improvement = r.si_sdr_out - r.si_sdr_in;
    cell.sum += improvement;
    cell.count += 1;
    auto& o = overall[bucket];
    o.sum += improvement;
    o.count += 1;
  }

  std::vector<std::string> buckets;
  for (const auto& [bucket, acc] : overall) buckets.push_back(bucket);
  std::sort(buckets.begin(), buckets.end(), [&](const std::string& a, const std::string& b) {
    const double ma = overall[a].sum / overall[a].count;
    const double mb = overall[b].sum / overall[b].count;
    return ma != mb ? ma > mb : a < b;  // descending mean improvement
  });

  std::vector<BreakdownRow> out;
  for (const auto& bucket : buckets) {
    for (const auto& [key, acc] : cells) {
      if (key.first != bucket) continue;
      out.push_back({bucket, key.second, acc.sum / acc.count, acc.count});
    }
  }
  return out;
}

std::string breakdown_csv(const std::vector<BreakdownRow>& rows) {
  std::ostringstream os;
  os << "bucket,nfe,mean_si_sdr_improvement,clips\n";
  for (const auto& r : rows) {
    os << r.bucket << "," << r.nfe << "," << util::format_double(r.mean_improvement) << ","
       << r.count << "\n";
  }
  return os.str();
}

}  // namespace flowsr::eval

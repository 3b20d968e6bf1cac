#include "vqf/streams.hpp"

#include <exception>

namespace vqf {

namespace {

std::vector<EstimateRecord> run_one(const StreamInput& s, const VqfParams& params) {
  Vqf filter(s.ts, params);
  return filter.update_batch(s.gyr, s.acc, s.mag);
}

}  // namespace

std::vector<std::vector<EstimateRecord>> process_streams(std::span<const StreamInput> streams,
                                                         const VqfParams& params) {
  const auto n = static_cast<long>(streams.size());
  std::vector<std::vector<EstimateRecord>> out(streams.size());
  std::vector<std::exception_ptr> errors(streams.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = run_one(streams[i], params);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<std::vector<EstimateRecord>> process_streams_serial(std::span<const StreamInput> streams,
                                                                const VqfParams& params) {
  std::vector<std::vector<EstimateRecord>> out;
  out.reserve(streams.size());
  for (const auto& s : streams) out.push_back(run_one(s, params));
  return out;
}

}  // namespace vqf

#pragma once

// Runs independent filter instances over many recordings at once. Each stream
// is processed strictly sequentially by one filter; streams are distributed
// over OpenMP threads. process_streams_serial is the reference the parallel
// kernel is tested against.

#include <span>
#include <vector>

#include "vqf/params.hpp"
#include "vqf/quat.hpp"
#include "vqf/vqf.hpp"

namespace vqf {

struct StreamInput {
  double ts = 0.0;
  std::span<const Vec3> gyr;
  std::span<const Vec3> acc;
  std::span<const Vec3> mag;  // may be empty
};

// Errors from individual streams (bad ts, length mismatch) are rethrown
// after all streams finished; the first failing stream in input order wins.
std::vector<std::vector<EstimateRecord>> process_streams(std::span<const StreamInput> streams,
                                                         const VqfParams& params = {});

std::vector<std::vector<EstimateRecord>> process_streams_serial(std::span<const StreamInput> streams,
                                                                const VqfParams& params = {});

}  // namespace vqf

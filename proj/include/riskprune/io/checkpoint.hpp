#pragma once

#include <string>

#include "riskprune/network.hpp"
#include "riskprune/prune.hpp"

namespace riskprune {

/*
 * Checkpoint container: a short text header followed by raw little-endian
 * IEEE-754 blobs, per layer weights row-major [out x in] then biases.
 *
 *   riskprune checkpoint 1
 *   precision float32|float64
 *   endian little
 *   layers <L>
 *   layer <in> <out> <activation>     (L lines)
 *   data
 *   <binary>
 *
 * float64 checkpoints round-trip bit-exactly; float32 ones reproduce
 * forward outputs up to single-precision rounding of the weights.
 */

enum class Precision { Float32, Float64 };

void save_checkpoint(const DenseNetwork& net, const std::string& path,
                     Precision precision = Precision::Float32);
DenseNetwork load_checkpoint(const std::string& path);

/*
 * Sparse export: same text header with "riskprune sparse 1", then per layer
 * a u64 nonzero count, count * (u32 row, u32 col, f64 value) triples in
 * row-major order, then the dense f64 bias vector.  Reloading reconstructs
 * a network whose forward outputs are bit-identical.
 */

void export_sparse(const PrunedNetwork& pn, const std::string& path);
DenseNetwork load_sparse(const std::string& path);

}  // namespace riskprune

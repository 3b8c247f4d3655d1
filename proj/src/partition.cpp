#include "bcdpep/partition.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace bcdpep {

BlockPartition::BlockPartition(int total_dim, std::vector<int> sizes)
    : total_dim_(total_dim), sizes_(std::move(sizes)) {
  if (total_dim_ <= 0) throw std::invalid_argument("BlockPartition: total_dim must be positive");
  if (sizes_.empty()) throw std::invalid_argument("BlockPartition: no blocks");
  offsets_.resize(sizes_.size());
  int off = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] <= 0) throw std::invalid_argument("BlockPartition: block sizes must be positive");
    offsets_[i] = off;
    off += sizes_[i];
  }
  if (off != total_dim_)
    throw std::invalid_argument("BlockPartition: block sizes sum to " + std::to_string(off) +
                                ", expected " + std::to_string(total_dim_));
}

BlockPartition BlockPartition::equal(int total_dim, int block_count) {
  if (block_count <= 0) throw std::invalid_argument("BlockPartition: block_count must be positive");
  if (total_dim <= 0 || total_dim % block_count != 0)
    throw std::invalid_argument("BlockPartition: block_count " + std::to_string(block_count) +
                                " does not divide dimension " + std::to_string(total_dim));
  return BlockPartition(total_dim, std::vector<int>(block_count, total_dim / block_count));
}

void BlockPartition::check_block(int block) const {
  if (block < 0 || block >= block_count())
    throw std::out_of_range("BlockPartition: block index " + std::to_string(block) +
                            " out of range [0, " + std::to_string(block_count()) + ")");
}

int BlockPartition::block_size(int block) const {
  check_block(block);
  return sizes_[block];
}

int BlockPartition::block_offset(int block) const {
  check_block(block);
  return offsets_[block];
}

int BlockPartition::block_of(int coordinate) const {
  if (coordinate < 0 || coordinate >= total_dim_)
    throw std::out_of_range("BlockPartition: coordinate out of range");
  int b = 0;
  while (coordinate >= offsets_[b] + sizes_[b]) ++b;
  return b;
}

int flatten(int outer, int inner, int block_count) {
  if (block_count <= 0) throw std::invalid_argument("flatten: block_count must be positive");
  if (outer < 0) throw std::out_of_range("flatten: outer index negative");
  if (inner < 0 || inner > block_count)
    throw std::out_of_range("flatten: inner index out of range [0, block_count]");
  return outer * block_count + inner;
}

FlatIndex unflatten(int flat, int block_count) {
  if (block_count <= 0) throw std::invalid_argument("unflatten: block_count must be positive");
  if (flat < 0) throw std::out_of_range("unflatten: flat index negative");
  FlatIndex ix;
  ix.flat = flat;
  if (flat == 0) return ix;
  ix.outer = (flat - 1) / block_count;
  ix.inner = (flat - 1) % block_count + 1;
  return ix;
}

int updated_block(int flat, int block_count) {
  if (flat < 1) throw std::out_of_range("updated_block: flat index must be >= 1");
  return unflatten(flat, block_count).inner - 1;
}

}  // namespace bcdpep

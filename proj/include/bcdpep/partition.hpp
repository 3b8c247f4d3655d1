#pragma once

#include <vector>

namespace bcdpep {

// Partition of coordinates 0..total_dim-1 into contiguous blocks 0..block_count-1.
class BlockPartition {
 public:
  BlockPartition() = default;
  BlockPartition(int total_dim, std::vector<int> sizes);
  // Splits total_dim into block_count equal blocks; block_count must divide total_dim.
  static BlockPartition equal(int total_dim, int block_count);

  int total_dim() const { return total_dim_; }
  int block_count() const { return static_cast<int>(sizes_.size()); }
  int block_size(int block) const;
  int block_offset(int block) const;
  int block_of(int coordinate) const;

  friend bool operator==(const BlockPartition& a, const BlockPartition& b) {
    return a.total_dim_ == b.total_dim_ && a.sizes_ == b.sizes_;
  }

 private:
  void check_block(int block) const;

  int total_dim_ = 0;
  std::vector<int> sizes_;
  std::vector<int> offsets_;
};

// Flat numbering of block-update states: state (outer, inner) with
// 0 <= inner <= block_count maps to outer*block_count + inner, identifying
// (outer, block_count) with (outer+1, 0). The canonical representative of a
// flat index q >= 1 has inner in 1..block_count; q = 0 maps to (0, 0).
struct FlatIndex {
  int outer = 0;
  int inner = 0;
  int flat = 0;
};

int flatten(int outer, int inner, int block_count);
FlatIndex unflatten(int flat, int block_count);
// Block updated at flat step q >= 1, in 0..block_count-1.
int updated_block(int flat, int block_count);

}  // namespace bcdpep

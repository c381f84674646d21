#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "erbp/linalg.hpp"

namespace erbp {

enum class Task { kIdentity, kSingleBit, kParityZero, kJoint };
enum class PatternKind { kSingleBit, kParityZero };

std::string task_name(Task t);
Task task_from_name(const std::string& name);

// One labelled binary input. Inputs hold exactly 0.0/1.0; labels are one-hot
// pairs. pattern_label is filled for the joint task only.
struct Example {
  Vector input;
  Vector label;
  Vector pattern_label;
};

struct Dataset {
  std::size_t n_half = 0;
  Task task = Task::kIdentity;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
};

struct Split {
  Dataset train;
  Dataset test;
};

inline constexpr std::size_t kMaxDatasetSize = 1000;
inline constexpr std::size_t kClassCap = kMaxDatasetSize / 2;

// True when input[i] == input[n_half + i] for all i.
bool halves_equal(const Vector& input);

// Pattern predicates for the non-relational tasks. single_bit: input[0] == 1.
// parity_zero: every even-indexed entry of the full vector is 0 (odd-indexed
// when odd_indexed is set; indices are 0-based).
bool pattern_holds(const Vector& input, PatternKind kind, bool odd_indexed = false);

// All 2^n_half vectors with identical halves, lexicographic order.
std::vector<Vector> enumerate_equal_half_vectors(std::size_t n_half);

// k distinct vectors whose halves differ in at least one position.
// Enumerates the population for n_half <= 10, rejection-samples above.
std::vector<Vector> sample_unequal_half_vectors(Rng& rng, std::size_t n_half,
                                                std::size_t k);

// Balanced identity dataset: min(2^n_half, 500) equal-half vectors and as many
// unequal ones, labels [1,0] for equal and [0,1] for unequal.
Dataset generate_identity_dataset(Rng& rng, std::size_t n_half);

// Balanced dataset labelled by the pattern predicate alone.
Dataset generate_pattern_dataset(Rng& rng, std::size_t n_half, PatternKind kind,
                                 bool odd_indexed = false);

// Identity-balanced dataset where every example additionally carries the
// pattern label; within each identity class the pattern classes are as
// balanced as the combinatorics allow.
Dataset generate_joint_dataset(Rng& rng, std::size_t n_half, PatternKind kind,
                               bool odd_indexed = false);

// 75/25 split, stratified per identity-label class, train fraction rounded to
// nearest within each class.
Split split_train_test(Rng& rng, const Dataset& d);

void write_dataset(const Dataset& d, const std::string& path);
Dataset read_dataset(const std::string& path);

// Serialized form (identical to the file contents written by write_dataset).
std::string dataset_to_string(const Dataset& d);

}  // namespace erbp

#include "erbp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "erbp/errors.hpp"

namespace erbp {
namespace {

// Inputs are manipulated as bit patterns (element 0 = most significant bit, so
// integer order is lexicographic vector order) and converted to real vectors
// only when an Example is materialized.

std::uint64_t mask_bits(std::size_t n) {
  return (std::uint64_t{1} << n) - 1;
}

Vector bits_to_vector(std::uint64_t bits, std::size_t len) {
  Vector v(len);
  for (std::size_t i = 0; i < len; ++i) {
    v[i] = static_cast<double>((bits >> (len - 1 - i)) & 1u);
  }
  return v;
}

bool bits_halves_equal(std::uint64_t bits, std::size_t n_half) {
  const std::uint64_t m = mask_bits(n_half);
  return ((bits >> n_half) & m) == (bits & m);
}

// Bit position of vector element j in a length-len pattern.
std::uint64_t element_bit(std::size_t len, std::size_t j) {
  return std::uint64_t{1} << (len - 1 - j);
}

bool bits_pattern(std::uint64_t bits, std::size_t n_half, PatternKind kind,
                  bool odd_indexed) {
  const std::size_t len = 2 * n_half;
  if (kind == PatternKind::kSingleBit) {
    return (bits & element_bit(len, 0)) != 0;
  }
  for (std::size_t j = odd_indexed ? 1 : 0; j < len; j += 2) {
    if (bits & element_bit(len, j)) return false;
  }
  return true;
}

Vector one_hot(bool first) {
  return first ? Vector{1.0, 0.0} : Vector{0.0, 1.0};
}

void check_n_half(std::size_t n_half, std::size_t lo = 1) {
  if (n_half < lo || n_half > 30) {
    throw ConfigError("n_half " + std::to_string(n_half) + " out of range [" +
                      std::to_string(lo) + ",30]");
  }
}

// Draws distinct bit patterns of the form (random & free_mask) | forced_bits,
// skipping any for which reject() is true.
template <class RejectFn>
std::vector<std::uint64_t> sample_patterns(Rng& rng, std::uint64_t free_mask,
                                           std::uint64_t forced_bits, std::size_t k,
                                           RejectFn reject) {
  std::vector<std::uint64_t> out;
  out.reserve(k);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(k * 2);
  while (out.size() < k) {
    const std::uint64_t bits = (rng.next_u64() & free_mask) | forced_bits;
    if (reject(bits)) continue;
    if (seen.insert(bits).second) out.push_back(bits);
  }
  return out;
}

}  // namespace

std::string task_name(Task t) {
  switch (t) {
    case Task::kIdentity: return "identity";
    case Task::kSingleBit: return "single_bit";
    case Task::kParityZero: return "parity_zero";
    case Task::kJoint: return "joint";
  }
  return "identity";
}

Task task_from_name(const std::string& name) {
  if (name == "identity") return Task::kIdentity;
  if (name == "single_bit") return Task::kSingleBit;
  if (name == "parity_zero") return Task::kParityZero;
  if (name == "joint") return Task::kJoint;
  throw ConfigError("unknown task '" + name + "'");
}

bool halves_equal(const Vector& input) {
  const std::size_t n = input.size() / 2;
  for (std::size_t i = 0; i < n; ++i) {
    if (input[i] != input[n + i]) return false;
  }
  return true;
}

bool pattern_holds(const Vector& input, PatternKind kind, bool odd_indexed) {
  if (kind == PatternKind::kSingleBit) return input[0] == 1.0;
  for (std::size_t j = odd_indexed ? 1 : 0; j < input.size(); j += 2) {
    if (input[j] != 0.0) return false;
  }
  return true;
}

std::vector<Vector> enumerate_equal_half_vectors(std::size_t n_half) {
  check_n_half(n_half);
  const std::uint64_t count = std::uint64_t{1} << n_half;
  std::vector<Vector> out;
  out.reserve(count);
  for (std::uint64_t h = 0; h < count; ++h) {
    out.push_back(bits_to_vector((h << n_half) | h, 2 * n_half));
  }
  return out;
}

std::vector<Vector> sample_unequal_half_vectors(Rng& rng, std::size_t n_half,
                                                std::size_t k) {
  check_n_half(n_half);
  const std::uint64_t population =
      (std::uint64_t{1} << (2 * n_half)) - (std::uint64_t{1} << n_half);
  if (k > population) {
    throw ConfigError("sample_unequal_half_vectors: k exceeds population");
  }
  std::vector<std::uint64_t> chosen;
  if (n_half <= 10) {
    // Population fits in memory: enumerate, then sample indices.
    std::vector<std::uint64_t> all;
    all.reserve(population);
    const std::uint64_t total = std::uint64_t{1} << (2 * n_half);
    for (std::uint64_t bits = 0; bits < total; ++bits) {
      if (!bits_halves_equal(bits, n_half)) all.push_back(bits);
    }
    for (std::size_t idx : sample_without_replacement(rng, all.size(), k)) {
      chosen.push_back(all[idx]);
    }
  } else {
    chosen = sample_patterns(rng, mask_bits(2 * n_half), 0, k, [&](std::uint64_t b) {
      return bits_halves_equal(b, n_half);
    });
  }
  std::vector<Vector> out;
  out.reserve(k);
  for (std::uint64_t bits : chosen) out.push_back(bits_to_vector(bits, 2 * n_half));
  return out;
}

Dataset generate_identity_dataset(Rng& rng, std::size_t n_half) {
  check_n_half(n_half);
  const std::uint64_t equal_population = std::uint64_t{1} << n_half;
  const std::size_t class_size =
      static_cast<std::size_t>(std::min<std::uint64_t>(equal_population, kClassCap));

  // Equal-half vectors are indexed by the integer value of their half, so a
  // downsample is just an index sample.
  std::vector<std::uint64_t> halves;
  if (equal_population <= kClassCap) {
    for (std::uint64_t h = 0; h < equal_population; ++h) halves.push_back(h);
  } else {
    for (std::size_t idx :
         sample_without_replacement(rng, static_cast<std::size_t>(equal_population),
                                    class_size)) {
      halves.push_back(static_cast<std::uint64_t>(idx));
    }
  }

  Dataset d;
  d.n_half = n_half;
  d.task = Task::kIdentity;
  d.examples.reserve(2 * class_size);
  for (std::uint64_t h : halves) {
    d.examples.push_back(
        {bits_to_vector((h << n_half) | h, 2 * n_half), one_hot(true), {}});
  }
  for (Vector& v : sample_unequal_half_vectors(rng, n_half, class_size)) {
    d.examples.push_back({std::move(v), one_hot(false), {}});
  }
  return d;
}

Dataset generate_pattern_dataset(Rng& rng, std::size_t n_half, PatternKind kind,
                                 bool odd_indexed) {
  check_n_half(n_half, 2);
  const std::size_t len = 2 * n_half;
  const std::uint64_t total = std::uint64_t{1} << len;
  const std::uint64_t yes_population =
      kind == PatternKind::kSingleBit ? total / 2 : (std::uint64_t{1} << n_half);
  const std::uint64_t no_population = total - yes_population;
  const std::size_t k = static_cast<std::size_t>(std::min<std::uint64_t>(
      std::min(yes_population, no_population), kClassCap));

  std::vector<std::uint64_t> yes, no;
  if (kind == PatternKind::kSingleBit) {
    const std::uint64_t bit0 = element_bit(len, 0);
    yes = sample_patterns(rng, mask_bits(len) & ~bit0, bit0, k,
                          [](std::uint64_t) { return false; });
    no = sample_patterns(rng, mask_bits(len) & ~bit0, 0, k,
                         [](std::uint64_t) { return false; });
  } else {
    std::uint64_t constrained = 0;
    for (std::size_t j = odd_indexed ? 1 : 0; j < len; j += 2) {
      constrained |= element_bit(len, j);
    }
    yes = sample_patterns(rng, mask_bits(len) & ~constrained, 0, k,
                          [](std::uint64_t) { return false; });
    no = sample_patterns(rng, mask_bits(len), 0, k, [&](std::uint64_t b) {
      return bits_pattern(b, n_half, kind, odd_indexed);
    });
  }

  Dataset d;
  d.n_half = n_half;
  d.task = kind == PatternKind::kSingleBit ? Task::kSingleBit : Task::kParityZero;
  d.examples.reserve(2 * k);
  for (std::uint64_t bits : yes) {
    d.examples.push_back({bits_to_vector(bits, len), one_hot(true), {}});
  }
  for (std::uint64_t bits : no) {
    d.examples.push_back({bits_to_vector(bits, len), one_hot(false), {}});
  }
  return d;
}

namespace {

struct JointCellCounts {
  std::uint64_t eq_yes, eq_no, uneq_yes, uneq_no;
};

JointCellCounts joint_cell_populations(std::size_t n_half, PatternKind kind,
                                       bool odd_indexed) {
  const std::uint64_t eq_total = std::uint64_t{1} << n_half;
  const std::uint64_t total = std::uint64_t{1} << (2 * n_half);
  std::uint64_t yes_total, eq_yes;
  if (kind == PatternKind::kSingleBit) {
    yes_total = total / 2;
    eq_yes = eq_total / 2;  // halves with first element 1
  } else {
    // The pattern constrains the half at positions {i : i matches parity} and
    // {i : i + n_half matches parity}; remaining half bits are free.
    std::size_t constrained = 0;
    for (std::size_t i = 0; i < n_half; ++i) {
      const bool lo = (i % 2 == (odd_indexed ? 1u : 0u));
      const bool hi = ((i + n_half) % 2 == (odd_indexed ? 1u : 0u));
      if (lo || hi) ++constrained;
    }
    yes_total = std::uint64_t{1} << n_half;
    eq_yes = std::uint64_t{1} << (n_half - constrained);
  }
  return {eq_yes, eq_total - eq_yes, yes_total - eq_yes,
          (total - eq_total) - (yes_total - eq_yes)};
}

// Pattern-class sizes within one identity class: as close to an even split of
// k as the populations allow.
std::pair<std::size_t, std::size_t> split_cell(std::size_t k, std::uint64_t avail_yes,
                                               std::uint64_t avail_no) {
  std::size_t yes = static_cast<std::size_t>(
      std::min<std::uint64_t>(avail_yes, (k + 1) / 2));
  std::size_t no = k - yes;
  if (no > avail_no) {
    no = static_cast<std::size_t>(avail_no);
    yes = k - no;
  }
  if (yes > avail_yes) {
    throw ConfigError("joint dataset: pattern/identity combination infeasible");
  }
  return {yes, no};
}

}  // namespace

Dataset generate_joint_dataset(Rng& rng, std::size_t n_half, PatternKind kind,
                               bool odd_indexed) {
  check_n_half(n_half, 2);
  const std::size_t len = 2 * n_half;
  const std::uint64_t eq_population = std::uint64_t{1} << n_half;
  const std::size_t k =
      static_cast<std::size_t>(std::min<std::uint64_t>(eq_population, kClassCap));

  const JointCellCounts pops = joint_cell_populations(n_half, kind, odd_indexed);
  const auto [eq_yes_n, eq_no_n] = split_cell(k, pops.eq_yes, pops.eq_no);
  const auto [uneq_yes_n, uneq_no_n] = split_cell(k, pops.uneq_yes, pops.uneq_no);

  std::vector<std::uint64_t> cells[4];  // eq_yes, eq_no, uneq_yes, uneq_no
  const std::size_t wanted[4] = {eq_yes_n, eq_no_n, uneq_yes_n, uneq_no_n};

  if (n_half <= 10) {
    // Bucket the full population, then sample each cell exactly.
    std::vector<std::uint64_t> buckets[4];
    const std::uint64_t total = std::uint64_t{1} << len;
    for (std::uint64_t bits = 0; bits < total; ++bits) {
      const bool eq = bits_halves_equal(bits, n_half);
      const bool yes = bits_pattern(bits, n_half, kind, odd_indexed);
      buckets[(eq ? 0 : 2) + (yes ? 0 : 1)].push_back(bits);
    }
    for (int c = 0; c < 4; ++c) {
      for (std::size_t idx :
           sample_without_replacement(rng, buckets[c].size(), wanted[c])) {
        cells[c].push_back(buckets[c][idx]);
      }
    }
  } else {
    // Constructive samplers per cell; rejected events are rare at this size.
    const std::uint64_t full_mask = mask_bits(len);
    const std::uint64_t half = mask_bits(n_half);
    std::uint64_t yes_forced = 0, yes_free = full_mask;
    if (kind == PatternKind::kSingleBit) {
      yes_forced = element_bit(len, 0);
      yes_free = full_mask & ~yes_forced;
    } else {
      for (std::size_t j = odd_indexed ? 1 : 0; j < len; j += 2) {
        yes_free &= ~element_bit(len, j);
      }
    }
    // Equal-half samplers work on the half bits and mirror them.
    std::uint64_t eq_yes_free = 0, eq_yes_forced = 0;
    for (std::size_t i = 0; i < n_half; ++i) {
      const std::uint64_t hb = std::uint64_t{1} << (n_half - 1 - i);
      const std::uint64_t full = ((hb << n_half) | hb);
      if ((full & yes_free) == full) {
        eq_yes_free |= hb;
      } else if (kind == PatternKind::kSingleBit && i == 0) {
        eq_yes_forced |= hb;
      }
    }
    auto mirror = [&](std::uint64_t h) { return (h << n_half) | h; };
    for (std::uint64_t h :
         sample_patterns(rng, eq_yes_free, eq_yes_forced, wanted[0],
                         [](std::uint64_t) { return false; })) {
      cells[0].push_back(mirror(h));
    }
    for (std::uint64_t h : sample_patterns(rng, half, 0, wanted[1], [&](std::uint64_t h2) {
           return bits_pattern(mirror(h2), n_half, kind, odd_indexed);
         })) {
      cells[1].push_back(mirror(h));
    }
    cells[2] = sample_patterns(rng, yes_free, yes_forced, wanted[2], [&](std::uint64_t b) {
      return bits_halves_equal(b, n_half);
    });
    cells[3] = sample_patterns(rng, full_mask, 0, wanted[3], [&](std::uint64_t b) {
      return bits_halves_equal(b, n_half) ||
             bits_pattern(b, n_half, kind, odd_indexed);
    });
  }

  Dataset d;
  d.n_half = n_half;
  d.task = Task::kJoint;
  d.examples.reserve(2 * k);
  for (int c = 0; c < 4; ++c) {
    const bool eq = c < 2;
    const bool yes = (c % 2) == 0;
    for (std::uint64_t bits : cells[c]) {
      d.examples.push_back({bits_to_vector(bits, len), one_hot(eq), one_hot(yes)});
    }
  }
  return d;
}

Split split_train_test(Rng& rng, const Dataset& d) {
  if (d.size() < 4) throw ConfigError("split: dataset must have at least 4 examples");
  std::vector<std::size_t> classes[2];
  for (std::size_t i = 0; i < d.size(); ++i) {
    classes[d.examples[i].label[0] == 1.0 ? 0 : 1].push_back(i);
  }
  Split s;
  s.train.n_half = s.test.n_half = d.n_half;
  s.train.task = s.test.task = d.task;
  for (auto& idx : classes) {
    if (idx.size() < 2) {
      throw ConfigError("split: a class has fewer than 2 examples");
    }
    shuffle(rng, idx);
    const std::size_t train_n =
        static_cast<std::size_t>(std::llround(0.75 * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < train_n ? s.train : s.test).examples.push_back(d.examples[idx[i]]);
    }
  }
  return s;
}

std::string dataset_to_string(const Dataset& d) {
  std::ostringstream out;
  out << "n_half=" << d.n_half << " task=" << task_name(d.task)
      << " size=" << d.size() << "\n";
  auto put_bits = [&](const Vector& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out << ' ';
      out << (v[i] == 1.0 ? '1' : '0');
    }
  };
  for (const Example& ex : d.examples) {
    put_bits(ex.input);
    out << " | ";
    put_bits(ex.label);
    if (!ex.pattern_label.empty()) {
      out << " | ";
      put_bits(ex.pattern_label);
    }
    out << "\n";
  }
  return out.str();
}

void write_dataset(const Dataset& d, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << dataset_to_string(d);
  if (!f) throw IoError("write failed for '" + path + "'");
}

namespace {

Vector parse_binary_fields(const std::string& part, std::size_t line_no) {
  Vector out;
  std::istringstream in(part);
  std::string tok;
  while (in >> tok) {
    if (tok == "0") {
      out.push_back(0.0);
    } else if (tok == "1") {
      out.push_back(1.0);
    } else {
      throw ParseError("non-binary entry '" + tok + "'", line_no);
    }
  }
  return out;
}

Vector parse_one_hot(const std::string& part, std::size_t line_no) {
  Vector v = parse_binary_fields(part, line_no);
  if (v.size() != 2 || v[0] + v[1] != 1.0) {
    throw ParseError("label is not a one-hot pair", line_no);
  }
  return v;
}

}  // namespace

Dataset read_dataset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::string header;
  if (!std::getline(f, header) || header.empty()) {
    throw ParseError("empty dataset file", 1);
  }
  Dataset d;
  std::size_t size = 0;
  {
    std::istringstream in(header);
    std::string tok;
    bool have_n = false, have_task = false, have_size = false;
    while (in >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ParseError("malformed header field '" + tok + "'", 1);
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      try {
        if (key == "n_half") {
          d.n_half = static_cast<std::size_t>(std::stoul(val));
          have_n = true;
        } else if (key == "task") {
          d.task = task_from_name(val);
          have_task = true;
        } else if (key == "size") {
          size = static_cast<std::size_t>(std::stoul(val));
          have_size = true;
        } else {
          throw ParseError("unknown header field '" + key + "'", 1);
        }
      } catch (const std::invalid_argument&) {
        throw ParseError("malformed header value '" + val + "'", 1);
      } catch (const ConfigError& e) {
        throw ParseError(e.what(), 1);
      }
    }
    if (!have_n || !have_task || !have_size) {
      throw ParseError("header must declare n_half, task and size", 1);
    }
    if (d.n_half < 1 || d.n_half > 30) throw ParseError("n_half out of range", 1);
  }

  std::string line;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) {
      if (d.size() == size && f.peek() == EOF) break;
      throw ParseError("unexpected blank line", line_no);
    }
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos = line.find('|'); ; pos = line.find('|', start)) {
      if (pos == std::string::npos) {
        parts.push_back(line.substr(start));
        break;
      }
      parts.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    const std::size_t expected_parts = d.task == Task::kJoint ? 3 : 2;
    if (parts.size() != expected_parts) {
      throw ParseError("expected " + std::to_string(expected_parts) +
                           " '|'-separated sections, found " +
                           std::to_string(parts.size()),
                       line_no);
    }
    Example ex;
    ex.input = parse_binary_fields(parts[0], line_no);
    if (ex.input.size() != 2 * d.n_half) {
      throw ParseError("expected " + std::to_string(2 * d.n_half) + " input bits, found " +
                           std::to_string(ex.input.size()),
                       line_no);
    }
    ex.label = parse_one_hot(parts[1], line_no);
    if (parts.size() == 3) ex.pattern_label = parse_one_hot(parts[2], line_no);
    if (d.task == Task::kIdentity || d.task == Task::kJoint) {
      if ((ex.label[0] == 1.0) != halves_equal(ex.input)) {
        throw ParseError("label contradicts the equal-halves predicate", line_no);
      }
    }
    d.examples.push_back(std::move(ex));
    if (d.size() > size) throw ParseError("more examples than declared size", line_no);
  }
  if (d.size() != size) {
    throw ParseError("declared size " + std::to_string(size) + " but found " +
                         std::to_string(d.size()) + " examples",
                     line_no + 1);
  }
  return d;
}

}  // namespace erbp

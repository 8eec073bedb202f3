// Copyright 2026 The flurp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "flurp/select.h"

#include <algorithm>
#include <functional>

#include "flurp/compare.h"
#include "flurp/error.h"

namespace flurp {

PartitionResult mul_row_partition(Party& party, const SharedMatrix& rows) {
  PartitionResult out;
  out.rows = rows;
  const std::size_t m = rows.rows.size();
  std::size_t longest = 0;
  for (const auto& r : rows.rows) {
    if (r.empty()) throw ShapeError("mul_row_partition: empty row");
    longest = std::max(longest, r.size());
  }
  auto& a = out.rows.rows;
  std::vector<long> t(m, -1);

  for (std::size_t j = 0; j + 1 < longest; ++j) {
    ArithmeticShare alpha{party.id(), rows.ring, rows.scale, {}};
    ArithmeticShare beta{party.id(), rows.ring, rows.scale, {}};
    std::vector<std::size_t> d;
    for (std::size_t i = 0; i < m; ++i) {
      if (j + 1 < a[i].size()) {
        alpha.values.push_back(a[i][j]);
        beta.values.push_back(a[i].back());
        d.push_back(i);
      }
    }
    BooleanShare c = packed_compare(party, alpha, beta);
    ++out.compare_calls;
    auto bits = open(party, c, "select.reveal");
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (!bits[k]) continue;
      std::size_t i = d[k];
      ++t[i];
      std::swap(a[i][static_cast<std::size_t>(t[i])], a[i][j]);
    }
  }
  out.pivots.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.pivots[i] = static_cast<std::size_t>(t[i] + 1);
    std::swap(a[i][out.pivots[i]], a[i].back());
  }
  return out;
}

SelectionResult mul_row_quick_select(Party& party, const SelectionTask& task) {
  const std::size_t m = task.rows.rows.size();
  if (task.targets.size() != m || task.source.size() != m) {
    throw ShapeError("mul_row_quick_select: targets/source length mismatch");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (task.targets[i] < 1 || task.targets[i] > task.rows.rows[i].size()) {
      throw RangeError("mul_row_quick_select: target out of range for row " +
                       std::to_string(task.source[i]));
    }
  }
  SelectionResult result;
  SelectionTask cur = task;
  while (!cur.rows.rows.empty()) {
    PartitionResult part = mul_row_partition(party, cur.rows);
    ++result.partition_calls;
    result.compare_calls += part.compare_calls;

    SelectionTask next{{cur.rows.party, cur.rows.ring, cur.rows.scale, {}}, {}, {}};
    for (std::size_t i = 0; i < part.rows.rows.size(); ++i) {
      const RingVector& row = part.rows.rows[i];
      const std::size_t q = part.pivots[i];
      const std::size_t t = cur.targets[i];
      const std::size_t len_r = row.size() - q;  // pivot plus everything >= it
      if (len_r == t) {
        result.values[cur.source[i]] =
            ArithmeticShare{cur.rows.party, cur.rows.ring, cur.rows.scale, {row[q]}};
      } else if (len_r > t) {
        // The pivot is the smallest of R, so it can be dropped. Keeping it
        // would never shrink an all-equal row.
        next.rows.rows.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(q + 1), row.end());
        next.targets.push_back(t);
        next.source.push_back(cur.source[i]);
      } else {
        next.rows.rows.emplace_back(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(q));
        next.targets.push_back(t - len_r);
        next.source.push_back(cur.source[i]);
      }
    }
    cur = std::move(next);
  }
  return result;
}

std::int64_t kth_largest_plain(std::vector<std::int64_t> row, std::size_t t) {
  if (t < 1 || t > row.size()) throw RangeError("kth_largest_plain: target out of range");
  std::sort(row.begin(), row.end(), std::greater<>());
  return row[t - 1];
}

}  // namespace flurp

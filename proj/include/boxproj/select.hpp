#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>

#include "boxproj/common.hpp"

namespace boxproj {

namespace detail {

template <class T, class Key>
void insertion_sort_by(std::span<T> a, Key key) {
    for (std::size_t i = 1; i < a.size(); ++i) {
        T tmp = std::move(a[i]);
        std::size_t j = i;
        for (; j > 0 && key(tmp) < key(a[j - 1]); --j) a[j] = std::move(a[j - 1]);
        a[j] = std::move(tmp);
    }
}

// Dutch-flag pass around `pivot`; returns the [begin, end) run of elements
// whose key equals the pivot.
template <class T, class V, class Key>
std::pair<std::size_t, std::size_t> three_way_partition(std::span<T> a, const V& pivot, Key key) {
    std::size_t lt = 0;
    std::size_t i = 0;
    std::size_t gt = a.size();
    while (i < gt) {
        if (key(a[i]) < pivot) {
            std::swap(a[i++], a[lt++]);
        } else if (pivot < key(a[i])) {
            std::swap(a[i], a[--gt]);
        } else {
            ++i;
        }
    }
    return {lt, gt};
}

}  // namespace detail

/// Returns the k-th smallest element (by `key`) of `values`, reordering the
/// slice so it is partitioned about the returned element: everything before
/// it compares <=, everything after compares >=.
///
/// Deterministic median-of-medians pivoting (groups of five), so the worst
/// case is linear; no randomized fallback on this path.
template <class T, class Key = std::identity>
T select_kth(std::span<T> values, std::size_t k, Key key = {}) {
    if (values.empty()) throw RankError("select_kth: empty slice");
    if (k >= values.size()) throw RankError("select_kth: rank out of range");

    std::span<T> a = values;
    while (true) {
        if (a.size() <= 5) {
            detail::insertion_sort_by(a, key);
            return a[k];
        }

        // Gather the five-group medians at the front of the slice.
        std::size_t n_medians = 0;
        std::size_t g = 0;
        for (; g + 5 <= a.size(); g += 5) {
            detail::insertion_sort_by(a.subspan(g, 5), key);
            std::swap(a[n_medians++], a[g + 2]);
        }
        if (std::size_t rem = a.size() - g; rem > 0) {
            detail::insertion_sort_by(a.subspan(g, rem), key);
            std::swap(a[n_medians++], a[g + rem / 2]);
        }

        auto pivot = key(select_kth(a.first(n_medians), n_medians / 2, key));
        auto [eq_begin, eq_end] = detail::three_way_partition(a, pivot, key);

        if (k < eq_begin) {
            a = a.first(eq_begin);
        } else if (k < eq_end) {
            return a[k];
        } else {
            k -= eq_end;
            a = a.subspan(eq_end);
        }
    }
}

}  // namespace boxproj

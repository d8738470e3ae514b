#pragma once

#include <string_view>

namespace vibraug {

struct ElementInfo {
  std::string_view symbol;
  int atomic_number;
  double mass;  // standard atomic weight, amu
};

// Conventional atomic weights (IUPAC 2021 abridged values). Enough coverage
// for the organic / halide chemistry this library deals with.
inline constexpr ElementInfo kElements[] = {
    {"H", 1, 1.00800},   {"He", 2, 4.00260},  {"Li", 3, 6.94000},
    {"Be", 4, 9.01218},  {"B", 5, 10.8100},   {"C", 6, 12.0110},
    {"N", 7, 14.0070},   {"O", 8, 15.9990},   {"F", 9, 18.9984},
    {"Ne", 10, 20.1797}, {"Na", 11, 22.9898}, {"Mg", 12, 24.3050},
    {"Al", 13, 26.9815}, {"Si", 14, 28.0850}, {"P", 15, 30.9738},
    {"S", 16, 32.0600},  {"Cl", 17, 35.4500}, {"Ar", 18, 39.9500},
    {"K", 19, 39.0983},  {"Ca", 20, 40.0780}, {"Ti", 22, 47.8670},
    {"Cr", 24, 51.9961}, {"Mn", 25, 54.9380}, {"Fe", 26, 55.8450},
    {"Co", 27, 58.9332}, {"Ni", 28, 58.6934}, {"Cu", 29, 63.5460},
    {"Zn", 30, 65.3800}, {"Se", 34, 78.9710}, {"Br", 35, 79.9040},
    {"I", 53, 126.904},
};

inline const ElementInfo* find_element(std::string_view symbol) {
  for (const auto& e : kElements)
    if (e.symbol == symbol) return &e;
  return nullptr;
}

inline const ElementInfo* find_element(int atomic_number) {
  for (const auto& e : kElements)
    if (e.atomic_number == atomic_number) return &e;
  return nullptr;
}

}  // namespace vibraug

#ifndef BEAMLOC_IO_HPP
#define BEAMLOC_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "beamloc/sim.hpp"

namespace beamloc {

// Dataset header line shared by both JSON-lines formats.
struct ScanHeader {
  std::string format;  // "trm-scan" or "conv-scan"
  int version = 1;
  double lambda = 0.0;
  double sigma_b = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  int length = 0;
  std::optional<std::uint64_t> seed;
};

std::string header_line(const ScanHeader& header);

void write_trm_scan(std::ostream& os, const ScanHeader& header, const TRMScan& scan);
void write_conventional_scan(std::ostream& os, const ScanHeader& header, const ConventionalScan& scan);

// Readers validate the format tag, version, and per-line invariants
// (counts >= 1, sorted times, contiguous k).
std::pair<ScanHeader, TRMScan> read_trm_scan(std::istream& is);
std::pair<ScanHeader, ConventionalScan> read_conventional_scan(std::istream& is);

// Peeks the header of either format.
ScanHeader read_header(std::istream& is);

}  // namespace beamloc

#endif

#pragma once

// Ground-truth shadow memory: the plaintext state an ideal unencrypted,
// instantly-persistent memory would hold after each op. Audits compare the
// simulated system against this.

#include <cstdint>
#include <map>

#include "eadrsim/types.hpp"
#include "eadrsim/workloads.hpp"

namespace eadrsim {

class GroundTruth {
 public:
  // Returns the value a read op observes (reads don't mutate).
  DataLine apply(const Op& op) {
    if (op.is_write) {
      mem_[op.addr] = op.value;
      return op.value;
    }
    return line(op.addr);
  }

  DataLine line(PhysAddr addr) const {
    auto it = mem_.find(addr);
    return it == mem_.end() ? DataLine{} : it->second;
  }

  const std::map<PhysAddr, DataLine>& lines() const { return mem_; }

 private:
  std::map<PhysAddr, DataLine> mem_;  // ordered: audits iterate ascending
};

}  // namespace eadrsim

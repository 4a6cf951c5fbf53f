#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace stickel {

// Outcome of a check. Failures keep a bounded list of concrete witnesses.
struct CheckReport {
  std::string name;
  bool pass = true;
  bool applicable = true;
  long checked = 0;
  long failed = 0;
  std::vector<std::string> witnesses;
  std::string note;

  void ok() { ++checked; }
  void fail(const std::string& witness) {
    ++checked;
    ++failed;
    pass = false;
    if (witnesses.size() < 16) witnesses.push_back(witness);
  }
  void merge(const CheckReport& o) {
    checked += o.checked;
    failed += o.failed;
    pass = pass && o.pass;
    for (auto& w : o.witnesses)
      if (witnesses.size() < 16) witnesses.push_back(w);
  }
  std::string status() const { return !applicable ? "N/A" : pass ? "PASS" : "FAIL"; }
};

}  // namespace stickel

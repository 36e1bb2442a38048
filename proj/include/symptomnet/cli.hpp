#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace symptomnet {

// Entry point of the command-line tool. `args` excludes the program name.
// Returns the process exit code; diagnostics go to `err`, results to `out`.
//
//   generate   --out-dir DIR [--config FILE] [--seed N] [--n N]
//   export-spec --out FILE [--no-condition-edge]
//   fit        --data CSV --out FILE [--network-spec FILE] [--ess 8000] [--manifest FILE]
//   score      --data CSV --network FILE --out CSV [--family NAME]
//   calibrate  --scores CSV --labels CSV --out FILE [--bags 10] [--seed N] [--manifest FILE]
//   evaluate   --data CSV --network FILE [--calibrator FILE] [--threshold 0.5] --report FILE [--curve CSV]
//   query      --network FILE [--calibrator FILE] (--request FILE | --evidence N=S ... --isolate N ...) [--out FILE]
//   serve      --network FILE [--calibrator FILE] [--host H] [--port P]
//   verify     --manifest FILE
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symptomnet

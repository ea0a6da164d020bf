// SPDX-License-Identifier: Apache-2.0
//
// skybeam: beamforming simulator for two-layer airborne massive-MIMO networks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SKYBEAM_HARNESS_HPP
#define SKYBEAM_HARNESS_HPP

#include <map>
#include <string>
#include <vector>

#include "skybeam/agents.hpp"
#include "skybeam/config.hpp"

namespace skybeam {

class MissingCheckpointError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Process exit codes of the CLI.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kBadConfig = 3,
    kDimMismatch = 4,
    kMissingCheckpoint = 5,
};

struct ResultRow {
    std::string method; // drl | zf | mrt
    std::string param;  // xi | l | K | none
    double value = 0.0;
    int slot = 0; // 1-based
    double mean_sumrate_bpshz = 0.0;
    double std_sumrate = 0.0;
    int episodes = 0;
    std::uint64_t seed = 0;
};

/// Evaluation at a single operating point; `nets` may be null (baselines
/// only). Rows carry the given sweep key.
std::vector<ResultRow> run_eval_point(const RunConfig &cfg, const ActorPair *nets,
                                      const std::string &param, double value);

/// Sweep over xi, l, or K. xi and l reuse one checkpoint across all points;
/// a K sweep needs one checkpoint per K value (head sizes differ), passed in
/// `k_checkpoints`. With no checkpoint at all, only the ZF/MRT baselines are
/// evaluated. Every point re-derives its streams from the master seed, so
/// paired draws are identical across points.
std::vector<ResultRow> run_sweep(const RunConfig &cfg, const std::string &param,
                                 const std::vector<double> &values,
                                 const std::map<int, std::string> &k_checkpoints = {});

/// Writes `results.csv` and `summary.json` into `dir`, deterministically
/// ordered by (method, value, slot).
void emit_results(std::vector<ResultRow> rows, const std::string &dir);

void write_training_log(const std::vector<EpisodeLog> &log, const std::string &path);

/// Fast built-in invariant checks; returns 0 when all pass.
int selftest();

int cli_main(int argc, char **argv);

} // namespace skybeam

#endif

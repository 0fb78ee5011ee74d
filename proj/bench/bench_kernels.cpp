// Copyright 2026 The qmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference kernels against their OpenMP counterparts.

#include <vector>

#include <benchmark/benchmark.h>

#include "qmem/kernels.hpp"

namespace {

using namespace qmem;

const MemoryModel& model() {
    static const MemoryModel m = default_memory_model();
    return m;
}

const AtomEnsemble& ensemble() {
    static const AtomEnsemble e = sample_ensemble(model().trap, model().light_shift.inhomogeneity, 1);
    return e;
}

void BM_CoherenceSerial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            kernels::coherence_serial(ensemble(), model().trap, model().geometry.deltak_1, model().light_shift, 0.05));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ensemble().size()));
}

void BM_CoherenceParallel(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            kernels::coherence_parallel(ensemble(), model().trap, model().geometry.deltak_1, model().light_shift, 0.05));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ensemble().size()));
}

kernels::TrialSpec trial_spec() {
    kernels::TrialSpec spec;
    spec.pair_probs = {0.43, 0.07, 0.07, 0.43};
    spec.idler_survival = 0.04;
    spec.herald_prob = 5e-4;
    spec.stream_seed = 3;
    return spec;
}

void BM_TrialsSerial(benchmark::State& state) {
    const kernels::TrialSpec spec = trial_spec();
    std::vector<kernels::TrialRecord> out(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        kernels::simulate_trials_serial(spec, 0, out);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TrialsParallel(benchmark::State& state) {
    const kernels::TrialSpec spec = trial_spec();
    std::vector<kernels::TrialRecord> out(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        kernels::simulate_trials_parallel(spec, 0, out);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_CoherenceSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoherenceParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsSerial)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsParallel)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

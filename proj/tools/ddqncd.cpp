#include "ddqncd/cli.hpp"

#ifdef __GLIBC__
#include <malloc.h>
#endif

int main(int argc, char** argv) {
#ifdef __GLIBC__
    // Training reallocates many mid-sized Eigen temporaries per step; keep them
    // on the heap instead of round-tripping through mmap/munmap.
    mallopt(M_MMAP_THRESHOLD, 64 << 20);
    mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
    return ddqncd::run_cli(argc, argv);
}

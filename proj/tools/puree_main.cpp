#include <cstdio>

int main() {
    std::puts("puree: CLI under construction");
    return 0;
}

/* conflicts_group: extensional version 8 (assume, logical, grouping=yes) */
#include <assert.h>
#include <stdlib.h>
#include <klee/klee.h>

int main(void) {
    int x0, x1, x2, x3, x4, x5;
    /* declare variables symbolic */
    klee_make_symbolic(&x0,sizeof(x0),"x0");
    klee_make_symbolic(&x1,sizeof(x1),"x1");
    klee_make_symbolic(&x2,sizeof(x2),"x2");
    klee_make_symbolic(&x3,sizeof(x3),"x3");
    klee_make_symbolic(&x4,sizeof(x4),"x4");
    klee_make_symbolic(&x5,sizeof(x5),"x5");
    /* enforce variable domains */
    klee_assume(x0>=0 && x0<=1);
    klee_assume(x1>=0 && x1<=1);
    klee_assume(x2>=0 && x2<=1);
    klee_assume(x3>=0 && x3<=1);
    klee_assume(x4>=0 && x4<=1);
    klee_assume(x5>=0 && x5<=1);
    /* constraints */
    klee_assume(!((x0==0 && x1==0 && x2==0) ||
                  (x0==0 && x1==1 && x2==0) ||
                  (x3==0 && x4==0 && x5==0) ||
                  (x3==0 && x4==1 && x5==0)));
    /* CSP is satisfiable */
    assert(0);
    return 0;
}

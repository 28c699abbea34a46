public class Tree {
    static native void walk(int[] nodes, int depth);

    void load(int[] nodes) {
        walk(nodes, 0);
    }
}

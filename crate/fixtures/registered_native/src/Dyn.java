package app;

public class Dyn {
    native void push(byte[] data);

    void deliver(byte[] data) {
        push(data);
    }
}
